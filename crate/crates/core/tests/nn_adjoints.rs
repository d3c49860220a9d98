//! Each primitive's adjoint against central differences, on random shapes up
//! to 8×8. The scalar loss is a fixed random linear functional of the output.

use cgsearch::nn::ops;
use cgsearch::nn::{grad_check, NnError, Objective, ParamStore, Tensor};
use proptest::prelude::*;

const TOL: f64 = 1e-6;
const EPS: f64 = 1e-5;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vector(name: &str, data: Vec<f64>) -> ParamStore {
    let mut p = ParamStore::new();
    p.insert(name, Tensor::vector(data));
    p
}

/// Unary elementwise op `f` with adjoint `df(x, y, dy)`; loss is `c · f(x)`.
struct Unary<F, D> {
    c: Vec<f64>,
    f: F,
    df: D,
}

impl<F, D> Objective for Unary<F, D>
where
    F: Fn(&[f64]) -> Vec<f64>,
    D: Fn(&[f64], &[f64], &[f64]) -> Vec<f64>,
{
    type Error = NnError;

    fn loss(&self, p: &ParamStore) -> Result<f64, NnError> {
        Ok(dot(&self.c, &(self.f)(p.get("x")?.data())))
    }

    fn loss_and_grad(&self, p: &ParamStore) -> Result<(f64, ParamStore), NnError> {
        let x = p.get("x")?.data();
        let y = (self.f)(x);
        let dx = (self.df)(x, &y, &self.c);
        Ok((dot(&self.c, &y), vector("x", dx)))
    }
}

struct Affine {
    c: Vec<f64>,
}

impl Objective for Affine {
    type Error = NnError;

    fn loss(&self, p: &ParamStore) -> Result<f64, NnError> {
        let y = ops::affine(p.get("w")?, p.get("b")?, p.get("x")?.data())?;
        Ok(dot(&self.c, &y))
    }

    fn loss_and_grad(&self, p: &ParamStore) -> Result<(f64, ParamStore), NnError> {
        let mut g = p.zeros_like();
        let x = p.get("x")?.data().to_vec();
        let w = p.get("w")?;
        let mut dw = g.get("w")?.clone();
        let mut db = g.get("b")?.clone();
        let dx = ops::affine_backward(w, &x, &self.c, &mut dw, &mut db);
        g.insert("w", dw);
        g.insert("b", db);
        g.insert("x", Tensor::vector(dx));
        Ok((self.loss(p)?, g))
    }
}

struct MatMul {
    c: Tensor,
}

impl Objective for MatMul {
    type Error = NnError;

    fn loss(&self, p: &ParamStore) -> Result<f64, NnError> {
        let y = ops::matmul(p.get("a")?, p.get("b")?)?;
        Ok(dot(self.c.data(), y.data()))
    }

    fn loss_and_grad(&self, p: &ParamStore) -> Result<(f64, ParamStore), NnError> {
        let (da, db) = ops::matmul_backward(p.get("a")?, p.get("b")?, &self.c)?;
        let mut g = ParamStore::new();
        g.insert("a", da);
        g.insert("b", db);
        Ok((self.loss(p)?, g))
    }
}

struct MeanRows {
    c: Vec<f64>,
}

impl Objective for MeanRows {
    type Error = NnError;

    fn loss(&self, p: &ParamStore) -> Result<f64, NnError> {
        Ok(dot(&self.c, &ops::mean_rows(p.get("m")?)))
    }

    fn loss_and_grad(&self, p: &ParamStore) -> Result<(f64, ParamStore), NnError> {
        let m = p.get("m")?;
        let mut g = ParamStore::new();
        g.insert("m", ops::mean_rows_backward(m.rows(), &self.c));
        Ok((self.loss(p)?, g))
    }
}

struct Binary {
    c: Vec<f64>,
    product: bool,
}

impl Objective for Binary {
    type Error = NnError;

    fn loss(&self, p: &ParamStore) -> Result<f64, NnError> {
        let (a, b) = (p.get("a")?.data(), p.get("b")?.data());
        let y = if self.product {
            ops::mul(a, b)?
        } else {
            ops::add(a, b)?
        };
        Ok(dot(&self.c, &y))
    }

    fn loss_and_grad(&self, p: &ParamStore) -> Result<(f64, ParamStore), NnError> {
        let (a, b) = (p.get("a")?.data(), p.get("b")?.data());
        let (da, db) = if self.product {
            ops::mul_backward(a, b, &self.c)
        } else {
            (self.c.clone(), self.c.clone())
        };
        let mut g = ParamStore::new();
        g.insert("a", Tensor::vector(da));
        g.insert("b", Tensor::vector(db));
        Ok((self.loss(p)?, g))
    }
}

struct Cosine {
    scale: f64,
}

impl Objective for Cosine {
    type Error = NnError;

    fn loss(&self, p: &ParamStore) -> Result<f64, NnError> {
        Ok(self.scale * ops::cosine_similarity(p.get("u")?.data(), p.get("v")?.data())?)
    }

    fn loss_and_grad(&self, p: &ParamStore) -> Result<(f64, ParamStore), NnError> {
        let (du, dv) = ops::cosine_backward(p.get("u")?.data(), p.get("v")?.data(), self.scale)?;
        let mut g = ParamStore::new();
        g.insert("u", Tensor::vector(du));
        g.insert("v", Tensor::vector(dv));
        Ok((self.loss(p)?, g))
    }
}

struct CrossEntropy {
    target: usize,
}

impl Objective for CrossEntropy {
    type Error = NnError;

    fn loss(&self, p: &ParamStore) -> Result<f64, NnError> {
        ops::softmax_cross_entropy_row(p.get("s")?.data(), self.target)
    }

    fn loss_and_grad(&self, p: &ParamStore) -> Result<(f64, ParamStore), NnError> {
        let g = ops::softmax_cross_entropy_backward(p.get("s")?.data(), self.target)?;
        Ok((self.loss(p)?, vector("s", g)))
    }
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

/// Inputs kept away from the leaky ReLU kink so differences stay one-sided.
fn off_kink(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![-2.0f64..-0.01, 0.01f64..2.0], n)
}

/// A central difference of a loss `L` carries roundoff of about
/// `1.1e-11 · |L|`, so a 1e-6 relative match needs every nonzero gradient
/// entry above roughly `1e-4 · |L|`. Points where random factors cancel
/// below that are discarded rather than scored.
fn check(obj: &impl Objective<Error = NnError>, p: &ParamStore) -> Result<(), TestCaseError> {
    let (loss, grads) = obj
        .loss_and_grad(p)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let floor = 1e-4 * loss.abs().max(1.0);
    prop_assume!(grads
        .iter()
        .flat_map(|(_, t)| t.data())
        .all(|g| *g == 0.0 || g.abs() >= floor));
    let report = grad_check(obj, p, EPS).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(report.max_rel_error < TOL, "{report:?}");
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tanh_adjoint((x, c) in (1usize..=8).prop_flat_map(|n| (values(n), values(n)))) {
        let obj = Unary { c, f: ops::tanh, df: |_: &[f64], y: &[f64], dy: &[f64]| ops::tanh_backward(y, dy) };
        check(&obj, &vector("x", x))?;
    }

    #[test]
    fn sigmoid_adjoint((x, c) in (1usize..=8).prop_flat_map(|n| (values(n), values(n)))) {
        let obj = Unary { c, f: ops::sigmoid, df: |_: &[f64], y: &[f64], dy: &[f64]| ops::sigmoid_backward(y, dy) };
        check(&obj, &vector("x", x))?;
    }

    #[test]
    fn leaky_relu_adjoint((x, c) in (1usize..=8).prop_flat_map(|n| (off_kink(n), values(n)))) {
        let obj = Unary {
            c,
            f: |x: &[f64]| ops::leaky_relu(x, 0.2),
            df: |x: &[f64], _: &[f64], dy: &[f64]| ops::leaky_relu_backward(x, 0.2, dy),
        };
        check(&obj, &vector("x", x))?;
    }

    #[test]
    fn softmax_adjoint((x, c) in (1usize..=8).prop_flat_map(|n| (values(n), values(n)))) {
        let obj = Unary { c, f: ops::softmax, df: |_: &[f64], y: &[f64], dy: &[f64]| ops::softmax_backward(y, dy) };
        check(&obj, &vector("x", x))?;
    }

    #[test]
    fn affine_adjoint(
        (w, b, x, c, rows, cols) in (1usize..=8, 1usize..=8).prop_flat_map(|(r, k)| {
            (values(r * k), values(r), values(k), values(r), Just(r), Just(k))
        })
    ) {
        let mut p = ParamStore::new();
        p.insert("w", Tensor::matrix(rows, cols, w).unwrap());
        p.insert("b", Tensor::vector(b));
        p.insert("x", Tensor::vector(x));
        check(&Affine { c }, &p)?;
    }

    #[test]
    fn matmul_adjoint(
        (a, b, c, n, k, m) in (1usize..=8, 1usize..=8, 1usize..=8).prop_flat_map(|(n, k, m)| {
            (values(n * k), values(k * m), values(n * m), Just(n), Just(k), Just(m))
        })
    ) {
        let mut p = ParamStore::new();
        p.insert("a", Tensor::matrix(n, k, a).unwrap());
        p.insert("b", Tensor::matrix(k, m, b).unwrap());
        check(&MatMul { c: Tensor::matrix(n, m, c).unwrap() }, &p)?;
    }

    #[test]
    fn mean_rows_adjoint(
        (m, c, rows, cols) in (1usize..=8, 1usize..=8).prop_flat_map(|(r, k)| {
            (values(r * k), values(k), Just(r), Just(k))
        })
    ) {
        let mut p = ParamStore::new();
        p.insert("m", Tensor::matrix(rows, cols, m).unwrap());
        check(&MeanRows { c }, &p)?;
    }

    #[test]
    fn add_and_mul_adjoints(
        (a, b, c) in (1usize..=8).prop_flat_map(|n| (values(n), values(n), values(n))),
        product in any::<bool>(),
    ) {
        let mut p = ParamStore::new();
        p.insert("a", Tensor::vector(a));
        p.insert("b", Tensor::vector(b));
        check(&Binary { c, product }, &p)?;
    }

    #[test]
    fn cosine_adjoint(
        (u, v) in (2usize..=8).prop_flat_map(|n| (values(n), values(n))),
        scale in -3.0f64..3.0,
    ) {
        prop_assume!(u.iter().map(|x| x * x).sum::<f64>() > 0.25);
        prop_assume!(v.iter().map(|x| x * x).sum::<f64>() > 0.25);
        let mut p = ParamStore::new();
        p.insert("u", Tensor::vector(u));
        p.insert("v", Tensor::vector(v));
        check(&Cosine { scale }, &p)?;
    }

    #[test]
    fn cross_entropy_adjoint(
        (s, target) in (1usize..=8).prop_flat_map(|n| (values(n), 0..n)),
    ) {
        check(&CrossEntropy { target }, &vector("s", s))?;
    }

    #[test]
    fn softmax_is_a_distribution(x in prop::collection::vec(-50.0f64..50.0, 1..=8)) {
        let y = ops::softmax(&x);
        prop_assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(y.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn cosine_symmetric_and_scale_invariant(
        (u, v) in (2usize..=8).prop_flat_map(|n| (values(n), values(n))),
        k in 0.1f64..10.0,
    ) {
        prop_assume!(u.iter().any(|x| x.abs() > 1e-3) && v.iter().any(|x| x.abs() > 1e-3));
        let c = ops::cosine_similarity(&u, &v).unwrap();
        prop_assert!((c - ops::cosine_similarity(&v, &u).unwrap()).abs() < 1e-12);
        let scaled: Vec<f64> = u.iter().map(|x| x * k).collect();
        prop_assert!((c - ops::cosine_similarity(&scaled, &v).unwrap()).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&c));
    }
}
