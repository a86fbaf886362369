use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::basis::{Basis, Parity};
use crate::error::{Error, Result};

/// Assembly fails when quadrature breaks skew-symmetry by more than this.
pub const SKEW_LIMIT: f64 = 1e-6;
/// Boundary Gram assembly fails when the gradient identity is off by more.
pub const IDENTITY_LIMIT: f64 = 1e-6;

/// `n_j ± n_l ± n_k = 0` for some choice of signs.
pub fn triad_admissible(nj: u32, nl: u32, nk: u32) -> bool {
    let (a, b, c) = (nj as i64, nl as i64, nk as i64);
    a + b == c || a + c == b || b + c == a
}

/// Every term of the triple product is an odd function of `θ` unless an odd
/// number of the three modes carry sine parity.
pub fn parity_admissible(pj: Parity, pl: Parity, pk: Parity) -> bool {
    let sines = [pj, pl, pk].iter().filter(|p| **p == Parity::Sin).count();
    sines % 2 == 1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorEntry {
    pub j: u32,
    pub l: u32,
    pub k: u32,
    pub value: f64,
}

/// `T[j][l][k] = ∫ (v_j·∇)v_l · v_k`, stored for selection-rule-admissible
/// triples only, sorted by `(j, l, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvectionTensor {
    modes: usize,
    entries: Vec<TensorEntry>,
    skew_deviation: f64,
}

impl ConvectionTensor {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn entries(&self) -> &[TensorEntry] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Max `|T[j][l][k] + T[j][k][l]|` over stored entries.
    pub fn skew_deviation(&self) -> f64 {
        self.skew_deviation
    }

    /// Stored value, or exactly zero for an inadmissible triple.
    pub fn get(&self, j: usize, l: usize, k: usize) -> f64 {
        let key = (j as u32, l as u32, k as u32);
        self.entries
            .binary_search_by(|e| (e.j, e.l, e.k).cmp(&key))
            .map_or(0.0, |i| self.entries[i].value)
    }

    /// `b_k = Σ_{j,l} c_j c_l T[j][l][k]` into `out`.
    pub fn apply_into(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in &self.entries {
            out[e.k as usize] += c[e.j as usize] * c[e.l as usize] * e.value;
        }
    }
}

pub fn apply_convection(tensor: &ConvectionTensor, c: &[f64]) -> Result<Vec<f64>> {
    if c.len() != tensor.modes {
        return Err(Error::Contract(format!(
            "state has {} coefficients, tensor {} modes",
            c.len(),
            tensor.modes
        )));
    }
    let mut out = vec![0.0; c.len()];
    tensor.apply_into(c, &mut out);
    Ok(out)
}

/// Per-mode radial arrays used by the triple products.
struct Radial<'a> {
    p: &'a [f64],
    dp: &'a [f64],
    q: &'a [f64],
    dq: &'a [f64],
    /// `Q / r`
    q_r: Vec<f64>,
    /// `n² P + Q`
    np_q: Vec<f64>,
    /// `Q + P`
    q_p: Vec<f64>,
}

pub fn assemble_convection(basis: &Basis) -> Result<ConvectionTensor> {
    let k = basis.len();
    let grid = basis.grid();
    let w = grid.r_weights();
    let radial: Vec<Radial<'_>> = basis
        .radial
        .iter()
        .zip(basis.pairs())
        .map(|(rp, pair)| {
            let n2 = (pair.n * pair.n) as f64;
            Radial {
                p: &rp.p,
                dp: &rp.dp,
                q: &rp.q,
                dq: &rp.dq,
                q_r: rp.q.iter().zip(grid.r_nodes()).map(|(q, r)| q / r).collect(),
                np_q: rp.p.iter().zip(&rp.q).map(|(p, q)| n2 * p + q).collect(),
                q_p: rp.p.iter().zip(&rp.q).map(|(p, q)| q + p).collect(),
            }
        })
        .collect();
    let rad3 = |a: &[f64], b: &[f64], c: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..w.len() {
            s += w[i] * a[i] * b[i] * c[i];
        }
        s
    };
    let ang3 = |a: &[f64], b: &[f64], c: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            s += a[i] * b[i] * c[i];
        }
        s * grid.theta_weight()
    };

    let pairs = basis.pairs();
    let idx = |j: usize, l: usize, m: usize| (j * k + l) * k + m;
    let mut dense = vec![0.0; k * k * k];
    let mut admissible = vec![false; k * k * k];
    for ju in 0..k {
        let (ru, au) = (&radial[ju], &basis.angular[ju]);
        for lv in 0..k {
            let (rv, av) = (&radial[lv], &basis.angular[lv]);
            for kw in 0..k {
                let (pu, pv, pw) = (&pairs[ju], &pairs[lv], &pairs[kw]);
                if !triad_admissible(pu.n, pv.n, pw.n) || !parity_admissible(pu.parity, pv.parity, pw.parity) {
                    continue;
                }
                let (rw, aw) = (&radial[kw], &basis.angular[kw]);
                // (u·∇v)·w in polar components, split into radial × angular.
                let term_a = rad3(ru.p, rv.dp, rw.p) * ang3(&au.df, &av.df, &aw.df);
                let term_b = -rad3(&ru.q_r, &rv.np_q, rw.p) * ang3(&au.f, &av.f, &aw.df);
                let term_c = rad3(ru.p, rv.dq, rw.q) * ang3(&au.df, &av.f, &aw.f);
                let term_d = rad3(&ru.q_r, &rv.q_p, rw.q) * ang3(&au.f, &av.df, &aw.f);
                dense[idx(ju, lv, kw)] = term_a + term_b + term_c + term_d;
                admissible[idx(ju, lv, kw)] = true;
            }
        }
    }

    let mut skew: f64 = 0.0;
    let mut entries = Vec::new();
    for j in 0..k {
        for l in 0..k {
            for m in 0..k {
                if !admissible[idx(j, l, m)] {
                    continue;
                }
                skew = skew.max((dense[idx(j, l, m)] + dense[idx(j, m, l)]).abs());
                entries.push(TensorEntry {
                    j: j as u32,
                    l: l as u32,
                    k: m as u32,
                    value: dense[idx(j, l, m)],
                });
            }
        }
    }
    if skew > SKEW_LIMIT {
        return Err(Error::GridTooCoarse {
            what: "convection skew-symmetry",
            deviation: skew,
            limit: SKEW_LIMIT,
        });
    }
    Ok(ConvectionTensor {
        modes: k,
        entries,
        skew_deviation: skew,
    })
}

/// `B[j][k] = ∫_Γ (κ − α) v_j·v_k dS`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGram {
    matrix: Vec<Vec<f64>>,
    identity_deviation: f64,
}

impl BoundaryGram {
    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.matrix[j][k]
    }

    pub fn modes(&self) -> usize {
        self.matrix.len()
    }

    /// Max `|∫∇v_j:∇v_k − λ_j δ_jk − B[j][k]|` measured at assembly.
    pub fn identity_deviation(&self) -> f64 {
        self.identity_deviation
    }

    /// `cᵀ B c`.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        let mut total = 0.0;
        for (j, row) in self.matrix.iter().enumerate() {
            if c[j] == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for (k, b) in row.iter().enumerate() {
                if *b != 0.0 {
                    s += b * c[k];
                }
            }
            total += c[j] * s;
        }
        total
    }
}

pub fn assemble_boundary_gram(basis: &Basis) -> Result<BoundaryGram> {
    let k = basis.len();
    let grid = basis.grid();
    let weight = basis.domain().boundary_weight();
    let pairs = basis.pairs();
    let mut matrix = vec![vec![0.0; k]; k];
    for j in 0..k {
        for m in j..k {
            // Circle harmonics of different order (or parity) are orthogonal.
            if pairs[j].n != pairs[m].n || pairs[j].parity != pairs[m].parity {
                continue;
            }
            let (rj, rm) = (&basis.radial[j], &basis.radial[m]);
            let (aj, am) = (&basis.angular[j], &basis.angular[m]);
            let ff = grid.angular_integral(aj.f.iter().zip(&am.f).map(|(a, b)| a * b));
            let dd = grid.angular_integral(aj.df.iter().zip(&am.df).map(|(a, b)| a * b));
            let v = weight * (rj.q_boundary * rm.q_boundary * ff + rj.p_boundary * rm.p_boundary * dd);
            matrix[j][m] = v;
            matrix[m][j] = v;
        }
    }

    let grad = basis.gradient_gram();
    let mut dev: f64 = 0.0;
    for j in 0..k {
        for m in 0..k {
            let diag = if j == m { pairs[j].lambda } else { 0.0 };
            dev = dev.max((grad[j][m] - diag - matrix[j][m]).abs());
        }
    }
    if dev > IDENTITY_LIMIT {
        return Err(Error::GridTooCoarse {
            what: "gradient Gram identity",
            deviation: dev,
            limit: IDENTITY_LIMIT,
        });
    }
    Ok(BoundaryGram {
        matrix,
        identity_deviation: dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::DomainSpec;
    use proptest::prelude::*;
    use std::vec::Vec;

    fn basis(k: usize, alpha: f64) -> Basis {
        Basis::build_auto(k, DomainSpec::new(alpha).unwrap()).unwrap()
    }

    #[test]
    fn selection_rules() {
        assert!(!triad_admissible(0, 1, 3));
        assert!(triad_admissible(1, 2, 3));
        assert!(triad_admissible(2, 5, 3));
        assert!(triad_admissible(0, 4, 4));
        assert!(parity_admissible(Parity::Sin, Parity::Cos, Parity::Cos));
        assert!(!parity_admissible(Parity::Cos, Parity::Cos, Parity::Cos));
        assert!(!parity_admissible(Parity::Sin, Parity::Sin, Parity::Cos));
    }

    /// Brute-force 2D quadrature of (u·∇v)·w from pointwise Cartesian fields
    /// with finite-difference gradients: independent of the separated path.
    fn brute_entry(b: &Basis, j: usize, l: usize, k: usize) -> f64 {
        let h = 1e-6;
        b.grid().integrate(|r, t| {
            let (x, y) = (r * t.cos(), r * t.sin());
            let cart = |m: usize, x: f64, y: f64| {
                let rr = (x * x + y * y).sqrt();
                let tt = y.atan2(x);
                let s = b.mode_at(m, rr, tt);
                let (c, si) = (tt.cos(), tt.sin());
                (s.u_r * c - s.u_theta * si, s.u_r * si + s.u_theta * c)
            };
            let u = cart(j, x, y);
            let w = cart(k, x, y);
            let vxp = cart(l, x + h, y);
            let vxm = cart(l, x - h, y);
            let vyp = cart(l, x, y + h);
            let vym = cart(l, x, y - h);
            let dvx = ((vxp.0 - vxm.0) / (2.0 * h), (vxp.1 - vxm.1) / (2.0 * h));
            let dvy = ((vyp.0 - vym.0) / (2.0 * h), (vyp.1 - vym.1) / (2.0 * h));
            let conv = (u.0 * dvx.0 + u.1 * dvy.0, u.0 * dvx.1 + u.1 * dvy.1);
            conv.0 * w.0 + conv.1 * w.1
        })
    }

    #[test]
    fn entries_match_brute_force() {
        let b = basis(8, 0.5);
        let t = assemble_convection(&b).unwrap();
        let mut checked = 0;
        for j in 0..b.len() {
            for l in 0..b.len() {
                for k in 0..b.len() {
                    let brute = brute_entry(&b, j, l, k);
                    let stored = t.get(j, l, k);
                    assert!((brute - stored).abs() < 1e-6, "T[{j}][{l}][{k}] {stored} vs {brute}");
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 512);
        assert!(t.entries().iter().any(|e| e.value.abs() > 1e-2));
    }

    #[test]
    fn axisymmetric_mode_has_no_self_interaction() {
        let b = basis(6, 0.5);
        let t = assemble_convection(&b).unwrap();
        let k0 = b.pairs().iter().position(|p| p.n == 0).unwrap();
        assert_eq!(t.get(k0, k0, k0), 0.0);
        let mut c = vec![0.0; b.len()];
        c[k0] = 0.7;
        let out = apply_convection(&t, &c).unwrap();
        assert!(out.iter().all(|v| v.abs() < 1e-12), "{out:?}");
        assert_eq!(apply_convection(&t, &vec![0.0; b.len()]).unwrap(), vec![0.0; b.len()]);
    }

    #[test]
    fn skew_symmetric() {
        let b = basis(24, 0.5);
        let t = assemble_convection(&b).unwrap();
        assert!(t.skew_deviation() < 1e-8, "{}", t.skew_deviation());
        // Inadmissible lookups are exactly zero.
        let (i0, i1, i3) = (
            b.pairs().iter().position(|p| p.n == 0).unwrap(),
            b.pairs().iter().position(|p| p.n == 1).unwrap(),
            b.pairs().iter().position(|p| p.n == 3).unwrap(),
        );
        assert_eq!(t.get(i0, i1, i3), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn convection_conserves_energy(c in proptest::collection::vec(-2.0f64..2.0, 16)) {
            static_basis(|b, t| {
                let out = apply_convection(t, &c).unwrap();
                let ip: f64 = out.iter().zip(&c).map(|(x, y)| x * y).sum();
                let n: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!(ip.abs() <= 1e-10 * n.powi(3).max(1e-300), "ip {ip} n {n}");
                let _ = b;
                Ok(())
            })?;
        }
    }

    fn static_basis<R>(f: impl FnOnce(&Basis, &ConvectionTensor) -> R) -> R {
        use std::sync::OnceLock;
        static CELL: OnceLock<(Basis, ConvectionTensor)> = OnceLock::new();
        let (b, t) = CELL.get_or_init(|| {
            let b = basis(16, 0.5);
            let t = assemble_convection(&b).unwrap();
            (b, t)
        });
        f(b, t)
    }

    #[test]
    fn boundary_gram_properties() {
        for alpha in [0.5, 2.0, 3.0] {
            let b = basis(16, alpha);
            let g = assemble_boundary_gram(&b).unwrap();
            assert!(
                g.identity_deviation() < 1e-8,
                "alpha={alpha}: {}",
                g.identity_deviation()
            );
            let p = b.pairs();
            for j in 0..b.len() {
                for k in 0..b.len() {
                    assert_eq!(g.get(j, k), g.get(k, j));
                    if p[j].n != p[k].n {
                        assert_eq!(g.get(j, k), 0.0);
                    }
                }
                if alpha == 2.0 {
                    assert!(g.get(j, j) <= 0.0);
                }
            }
        }
    }

    #[test]
    fn diagonal_diffusion() {
        // ⟨A v_j, v_k⟩ = ∫∇v_j:∇v_k − B[j][k] = λ_j δ_jk.
        let b = basis(20, 0.5);
        let g = assemble_boundary_gram(&b).unwrap();
        let grad = b.gradient_gram();
        let lambdas: Vec<f64> = b.lambdas();
        for j in 0..b.len() {
            for k in 0..b.len() {
                let a = grad[j][k] - g.get(j, k);
                let want = if j == k { lambdas[j] } else { 0.0 };
                assert!((a - want).abs() < 1e-8, "{j},{k}: {a} vs {want}");
            }
        }
    }

    #[test]
    fn quadratic_form_matches_dense() {
        let b = basis(10, 0.5);
        let g = assemble_boundary_gram(&b).unwrap();
        let c: Vec<f64> = (0..10).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut dense = 0.0;
        for j in 0..10 {
            for k in 0..10 {
                dense += c[j] * g.get(j, k) * c[k];
            }
        }
        assert!((g.quadratic_form(&c) - dense).abs() < 1e-13);
    }

    #[test]
    fn dimension_mismatch() {
        let b = basis(3, 0.5);
        let t = assemble_convection(&b).unwrap();
        assert!(apply_convection(&t, &[1.0, 2.0]).is_err());
    }
}
