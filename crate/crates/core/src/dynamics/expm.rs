//! Matrix exponential by scaling and squaring with diagonal Pade approximants
//! of degree 3, 5, 7, 9 or 13, chosen from the 1-norm (Higham 2005).

use nalgebra::{ComplexField, DMatrix};
use num_traits::Float;

use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn one_norm<T: ComplexField<RealField = f64> + Copy>(m: &DMatrix<T>) -> f64 {
    m.column_iter()
        .map(|col| col.iter().map(|z| z.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled<T: ComplexField<RealField = f64> + Copy>(m: &DMatrix<T>, s: f64) -> DMatrix<T> {
    m.map(|z| z.scale(s))
}

/// `exp(m t)`.
pub fn expm<T>(m: &DMatrix<T>, t: f64) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = crate::linalg::ensure_square(m)?;
    if !t.is_finite() || m.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let identity = DMatrix::<T>::identity(n, n);
    if t == 0.0 || n == 0 {
        return Ok(identity);
    }
    let a = scaled(m, t);
    let norm = one_norm(&a);

    for (degree, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            let (u, v) = pade_low(&a, coeffs);
            return solve_pade(u, v);
        }
    }

    let squarings = if norm > THETA_13 {
        Float::ceil(Float::log2(norm / THETA_13)) as u32
    } else {
        0
    };
    let a = scaled(&a, Float::exp2(-(squarings as f64)));
    let (u, v) = pade_13(&a);
    let mut result = solve_pade(u, v)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// Odd part `U` and even part `V` of the degree-`m` numerator, m <= 9.
fn pade_low<T>(a: &DMatrix<T>, b: &[f64]) -> (DMatrix<T>, DMatrix<T>)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    let a2 = a * a;
    let mut power = DMatrix::<T>::identity(n, n);
    let mut odd = scaled(&power, b[1]);
    let mut even = scaled(&power, b[0]);
    for k in (2..b.len()).step_by(2) {
        power = &power * &a2;
        even += scaled(&power, b[k]);
        if k + 1 < b.len() {
            odd += scaled(&power, b[k + 1]);
        }
    }
    (a * odd, even)
}

fn pade_13<T>(a: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>)
where
    T: ComplexField<RealField = f64> + Copy,
{
    let b = &B13;
    let n = a.nrows();
    let id = DMatrix::<T>::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = scaled(&a6, b[13]) + scaled(&a4, b[11]) + scaled(&a2, b[9]);
    let u = a * (&a6 * inner_u
        + scaled(&a6, b[7])
        + scaled(&a4, b[5])
        + scaled(&a2, b[3])
        + scaled(&id, b[1]));
    let inner_v = scaled(&a6, b[12]) + scaled(&a4, b[10]) + scaled(&a2, b[8]);
    let v = &a6 * inner_v + scaled(&a6, b[6]) + scaled(&a4, b[4]) + scaled(&a2, b[2]) + scaled(&id, b[0]);
    (u, v)
}

/// `(V - U)^{-1} (V + U)`.
fn solve_pade<T>(u: DMatrix<T>, v: DMatrix<T>) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or(Error::Numerical("singular Pade denominator"))
}
