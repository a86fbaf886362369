//! Identity-level checks on trajectories and bases: the stochastic energy
//! balance, vorticity norms, the boundary vorticity relation and basis
//! inequality ratios.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::basis::{Basis, Parity};
use crate::error::{Error, Result};
use crate::galerkin::{SpectralField, Trajectory};

/// One saved step of the energy balance. All integrals are left-endpoint
/// sums over every step up to `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub step: usize,
    pub t: f64,
    /// `‖u(t)‖²`
    pub energy: f64,
    /// `2ν ∫‖∇u‖²`
    pub dissipation: f64,
    /// `‖u(0)‖²`
    pub initial: f64,
    /// `2ν ∫∫_Γ (κ − α)|u|²`
    pub boundary: f64,
    /// `2 ∫⟨f, u⟩`
    pub forcing: f64,
    /// `2 ∫⟨√Q dW, u⟩`
    pub noise: f64,
    /// `tr(Q) t`
    pub ito: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAudit {
    pub rows: Vec<AuditRow>,
}

impl EnergyAudit {
    pub fn final_residual(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.residual)
    }

    /// `|R(T)| / max_t ‖u(t)‖²` (0 for an identically zero run).
    pub fn relative_residual(&self) -> f64 {
        let scale = self.rows.iter().map(|r| r.energy).fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            self.final_residual().abs() / scale
        }
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual.abs()).fold(0.0, f64::max)
    }
}

pub fn energy_audit(traj: &Trajectory) -> Result<EnergyAudit> {
    let first = traj
        .records
        .first()
        .ok_or_else(|| Error::Contract("trajectory has no records".into()))?;
    if first.step != 0 {
        return Err(Error::Contract(format!(
            "first record is step {}, the audit needs step 0",
            first.step
        )));
    }
    let nu = traj.nu;
    let initial = first.energy;
    let rows = traj
        .records
        .iter()
        .map(|r| {
            let dissipation = 2.0 * nu * r.acc.grad;
            let boundary = 2.0 * nu * r.acc.boundary;
            let forcing = 2.0 * r.acc.forcing;
            let noise = 2.0 * r.acc.noise;
            let ito = traj.trace_q * r.t;
            AuditRow {
                step: r.step,
                t: r.t,
                energy: r.energy,
                dissipation,
                initial,
                boundary,
                forcing,
                noise,
                ito,
                residual: (r.energy + dissipation) - (initial + boundary + forcing + noise + ito),
            }
        })
        .collect::<Vec<_>>();
    if rows.iter().any(|r| !r.residual.is_finite()) {
        return Err(Error::Contract("audit term is not finite".into()));
    }
    Ok(EnergyAudit { rows })
}

/// Vorticity in the `ζ_k = curl v_k / μ_k` family: `ξ = Σ d_k ζ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct VorticityView {
    d: Vec<f64>,
}

impl VorticityView {
    pub fn new(c: &SpectralField, basis: &Basis) -> Self {
        Self {
            d: c.vorticity_coeffs(basis),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.d
    }

    /// `‖ξ‖²_{L²} = dᵀ G_ζ d`; equals `|d|²` when `α = 2`.
    pub fn enstrophy(&self, basis: &Basis) -> f64 {
        let g = basis.vorticity_gram();
        let mut total = 0.0;
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                total += self.d[i] * v * self.d[j];
            }
        }
        total
    }

    /// `ξ(r, θ)`.
    pub fn sample(&self, basis: &Basis, r: f64, theta: f64) -> f64 {
        let mut xi = 0.0;
        for (k, (d, p)) in self.d.iter().zip(basis.pairs()).enumerate() {
            if *d != 0.0 {
                xi += d / p.mu * basis.mode_at(k, r, theta).xi;
            }
        }
        xi
    }
}

/// Tabulated vorticity profiles for repeated norm evaluation on the basis
/// grid, plus the boundary ring.
#[derive(Debug, Clone)]
pub struct VorticityGrid {
    modes: usize,
    nr: usize,
    ntheta: usize,
    /// `X_k(r_i)`, mode-major.
    radial: Vec<f64>,
    /// `Θ_k(θ_j)`, mode-major.
    angular: Vec<f64>,
    boundary: Vec<f64>,
    r_weights: Vec<f64>,
    theta_weight: f64,
}

impl VorticityGrid {
    pub fn new(basis: &Basis) -> Self {
        let grid = basis.grid();
        let mut radial = Vec::with_capacity(basis.len() * grid.nr());
        let mut angular = Vec::with_capacity(basis.len() * grid.ntheta());
        let mut boundary = Vec::with_capacity(basis.len());
        for k in 0..basis.len() {
            radial.extend_from_slice(&basis.radial[k].x);
            angular.extend_from_slice(&basis.angular[k].f);
            boundary.push(basis.radial[k].x_boundary);
        }
        Self {
            modes: basis.len(),
            nr: grid.nr(),
            ntheta: grid.ntheta(),
            radial,
            angular,
            boundary,
            r_weights: grid.r_weights().to_vec(),
            theta_weight: grid.theta_weight(),
        }
    }

    fn ring(&self, c: &[f64], amp: impl Fn(usize) -> f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..self.modes {
            let a = c[k] * amp(k);
            if a == 0.0 {
                continue;
            }
            let ang = &self.angular[k * self.ntheta..(k + 1) * self.ntheta];
            for (o, t) in out.iter_mut().zip(ang) {
                *o += a * t;
            }
        }
    }

    /// `∫ |ξ|^p` over the disk.
    pub fn lp_pow(&self, c: &[f64], p: f64) -> f64 {
        let mut ring = vec![0.0; self.ntheta];
        let mut total = 0.0;
        for i in 0..self.nr {
            self.ring(c, |k| self.radial[k * self.nr + i], &mut ring);
            let s: f64 = if p == 2.0 {
                ring.iter().map(|v| v * v).sum()
            } else if p == 4.0 {
                ring.iter().map(|v| (v * v) * (v * v)).sum()
            } else {
                ring.iter().map(|v| v.abs().powf(p)).sum()
            };
            total += self.r_weights[i] * s;
        }
        total * self.theta_weight
    }

    /// `(max |ξ|, radius, angle)` over interior nodes and the boundary ring.
    pub fn max_node(&self, c: &[f64], r_nodes: &[f64], theta_nodes: &[f64]) -> (f64, f64, f64) {
        let mut ring = vec![0.0; self.ntheta];
        let mut best = (0.0, 0.0, 0.0);
        let mut scan = |ring: &[f64], r: f64| {
            for (v, &t) in ring.iter().zip(theta_nodes) {
                if v.abs() > best.0 {
                    best = (v.abs(), r, t);
                }
            }
        };
        for i in 0..self.nr {
            self.ring(c, |k| self.radial[k * self.nr + i], &mut ring);
            scan(&ring, r_nodes[i]);
        }
        self.ring(c, |k| self.boundary[k], &mut ring);
        scan(&ring, 1.0);
        best
    }
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5.0f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..60 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
        if b - a < 1e-12 {
            break;
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `‖ξ‖_{L^p}` for `p ∈ [2, ∞]`. Finite `p` by quadrature; `p = ∞` by the
/// grid maximum (boundary ring included) refined by a local line search.
pub fn vorticity_lp(c: &SpectralField, basis: &Basis, p: f64) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::Domain(format!("vorticity norm needs p >= 2, got {p}")));
    }
    if c.len() != basis.len() {
        return Err(Error::Contract(format!(
            "field has {} coefficients, basis {}",
            c.len(),
            basis.len()
        )));
    }
    if c.coeffs().iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let vg = VorticityGrid::new(basis);
    if p.is_finite() {
        return Ok(vg.lp_pow(c.coeffs(), p).powf(1.0 / p));
    }
    let grid = basis.grid();
    let (best, r0, t0) = vg.max_node(c.coeffs(), grid.r_nodes(), grid.theta_nodes());
    let xi = |r: f64, t: f64| basis.field_at(c.coeffs(), r, t).xi.abs();
    let h = grid.theta_weight();
    let (t1, _) = golden_max(|t| xi(r0, t), t0 - h, t0 + h);
    let nodes = grid.r_nodes();
    let i = nodes.partition_point(|&r| r < r0);
    let lo = if i == 0 { 0.0 } else { nodes[i - 1] };
    let hi = nodes.get(i + 1).copied().unwrap_or(1.0).min(1.0);
    let (_, v) = golden_max(|r| xi(r, t1), lo, hi);
    Ok(best.max(v).max(xi(1.0, t1)))
}

/// `sup_θ |ξ(1, θ) − (2κ − α)(u·t)(1, θ)|` over the angular nodes.
pub fn boundary_residual(c: &SpectralField, basis: &Basis) -> f64 {
    let coupling = basis.domain().vorticity_coupling();
    let nt = basis.grid().ntheta();
    let mut ring = vec![0.0; nt];
    for (k, &ck) in c.coeffs().iter().enumerate() {
        if ck == 0.0 {
            continue;
        }
        let rp = &basis.radial[k];
        let a = ck * (rp.x_boundary - coupling * rp.q_boundary);
        for (o, t) in ring.iter_mut().zip(&basis.angular[k].f) {
            *o += a * t;
        }
    }
    ring.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityRow {
    pub k: usize,
    pub n: u32,
    pub parity: Parity,
    pub lambda: f64,
    pub mu: f64,
    /// `μ_k² / (1 + λ_k)`
    pub mu_ratio: f64,
    /// `‖ζ_k‖_{H¹} / (λ_k + 1)`
    pub h1_ratio: f64,
    /// `‖ζ_k‖_{L²}`, 1 by construction.
    pub zeta_l2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub rows: Vec<InequalityRow>,
}

impl InequalityReport {
    pub fn max_mu_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.mu_ratio).fold(0.0, f64::max)
    }

    pub fn max_h1_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.h1_ratio).fold(0.0, f64::max)
    }

    /// Both maxima within `factor` times those of `reference`.
    pub fn bounded_by(&self, reference: &Self, factor: f64) -> bool {
        self.max_mu_ratio() <= factor * reference.max_mu_ratio()
            && self.max_h1_ratio() <= factor * reference.max_h1_ratio()
    }
}

pub fn basis_inequality_report(basis: &Basis) -> InequalityReport {
    let rows = basis
        .pairs()
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let (l2, grad) = basis.vorticity_h1_squared(k);
            InequalityRow {
                k,
                n: p.n,
                parity: p.parity,
                lambda: p.lambda,
                mu: p.mu,
                mu_ratio: p.mu * p.mu / (1.0 + p.lambda),
                h1_ratio: (l2 + grad).sqrt() / p.mu / (p.lambda + 1.0),
                zeta_l2: l2.sqrt() / p.mu,
            }
        })
        .collect();
    InequalityReport { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::DomainSpec;
    use crate::galerkin::{Operators, SimConfig, Simulator};
    use crate::noise::{sample_path, NoisePath, NoiseSpec};
    use crate::quadrature::QuadratureGrid;
    use core::f64::consts::PI;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn lions8() -> &'static Basis {
        static CELL: OnceLock<Basis> = OnceLock::new();
        CELL.get_or_init(|| Basis::build_auto(8, DomainSpec::lions()).unwrap())
    }

    fn friction10() -> &'static Basis {
        static CELL: OnceLock<Basis> = OnceLock::new();
        CELL.get_or_init(|| Basis::build_auto(10, DomainSpec::new(0.5).unwrap()).unwrap())
    }

    #[test]
    fn zero_field_norms() {
        let b = friction10();
        let z = SpectralField::zeros(10);
        for p in [2.0, 4.0, f64::INFINITY] {
            assert_eq!(vorticity_lp(&z, b, p).unwrap(), 0.0);
        }
        assert_eq!(boundary_residual(&z, b), 0.0);
        assert!(vorticity_lp(&z, b, 1.5).is_err());
    }

    #[test]
    fn single_mode_l2_is_mu() {
        let b = friction10();
        for k in 0..10 {
            let mut c = vec![0.0; 10];
            c[k] = -0.8;
            let got = vorticity_lp(&c.into(), b, 2.0).unwrap();
            let want = 0.8 * b.pairs()[k].mu;
            assert!((got - want).abs() < 1e-8 * want);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn enstrophy_identity(c in proptest::collection::vec(-1.0f64..1.0, 8)) {
            let b = lions8();
            let field = SpectralField::from(c);
            let view = VorticityView::new(&field, b);
            let d2: f64 = view.coeffs().iter().map(|d| d * d).sum();
            let l2 = vorticity_lp(&field, b, 2.0).unwrap();
            prop_assert!((l2 - d2.sqrt()).abs() <= 1e-8 * d2.sqrt().max(1.0));
            prop_assert!((view.enstrophy(b) - d2).abs() <= 1e-8 * d2.max(1.0));
        }

        #[test]
        fn friction_enstrophy_uses_gram(c in proptest::collection::vec(-1.0f64..1.0, 10)) {
            let b = friction10();
            let field = SpectralField::from(c);
            let l2 = vorticity_lp(&field, b, 2.0).unwrap();
            let e = VorticityView::new(&field, b).enstrophy(b);
            prop_assert!((l2 * l2 - e).abs() <= 1e-8 * e.max(1.0));
        }

        #[test]
        fn boundary_relation_holds(c in proptest::collection::vec(-1.0f64..1.0, 10)) {
            let b = friction10();
            let l1: f64 = c.iter().map(|v| v.abs()).sum();
            let res = boundary_residual(&c.into(), b);
            prop_assert!(res <= 1e-8 * l1.max(1.0), "{res}");
        }
    }

    #[test]
    fn lions_boundary_vorticity_vanishes() {
        let b = lions8();
        let c: Vec<f64> = (0..8).map(|i| (i as f64 + 0.5).cos()).collect();
        let field = SpectralField::from(c.clone());
        let res = boundary_residual(&field, b);
        assert!(res <= 1e-8, "{res}");
        let xi_max = (0..64)
            .map(|j| b.field_at(&c, 1.0, j as f64 * PI / 32.0).xi.abs())
            .fold(0.0, f64::max);
        assert!(xi_max <= 1e-8, "{xi_max}");
    }

    #[test]
    fn sup_norm_matches_pointwise_search() {
        let b = friction10();
        let c: Vec<f64> = (0..10).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.3).collect();
        let sup = vorticity_lp(&c.clone().into(), b, f64::INFINITY).unwrap();
        // Dense brute-force scan as an independent reference.
        let mut brute = 0.0f64;
        for i in 0..=300 {
            for j in 0..360 {
                let r = i as f64 / 300.0;
                let t = j as f64 * PI / 180.0;
                brute = brute.max(b.field_at(&c, r, t).xi.abs());
            }
        }
        assert!(sup >= brute * (1.0 - 1e-4), "{sup} {brute}");
        assert!(sup <= brute * (1.0 + 1e-3), "{sup} {brute}");
    }

    #[test]
    fn norms_are_grid_converged() {
        let dom = DomainSpec::new(0.5).unwrap();
        let coarse = friction10();
        let s_max = coarse.pairs().iter().map(|p| p.s).fold(0.0, f64::max);
        let grid = QuadratureGrid::sized_for(coarse.n_max(), s_max);
        let fine_grid = QuadratureGrid::new(2 * grid.nr(), 2 * grid.ntheta()).unwrap();
        let fine = Basis::from_pairs(dom, coarse.pairs(), fine_grid).unwrap();
        let c: Vec<f64> = (0..10).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let f = SpectralField::from(c);
        for p in [2.0, 4.0, 6.0] {
            let (a, bb) = (
                vorticity_lp(&f, coarse, p).unwrap(),
                vorticity_lp(&f, &fine, p).unwrap(),
            );
            assert!((a - bb).abs() < 1e-8 * bb, "p={p}: {a} {bb}");
        }
        // |ξ|³ has kinks on the zero set of ξ, so only algebraic convergence.
        let (a, bb) = (
            vorticity_lp(&f, coarse, 3.0).unwrap(),
            vorticity_lp(&f, &fine, 3.0).unwrap(),
        );
        assert!((a - bb).abs() < 1e-4 * bb, "{a} {bb}");
        let (a, bb) = (
            vorticity_lp(&f, coarse, f64::INFINITY).unwrap(),
            vorticity_lp(&f, &fine, f64::INFINITY).unwrap(),
        );
        assert!((a - bb).abs() < 1e-3 * bb, "{a} {bb}");
    }

    #[test]
    fn inequality_ratios_bounded() {
        let small = basis_inequality_report(lions8());
        assert_eq!(small.rows.len(), 8);
        for r in &small.rows {
            assert!(r.mu_ratio.is_finite() && r.h1_ratio.is_finite());
            assert!((r.zeta_l2 - 1.0).abs() < 1e-8);
        }
        let big = basis_inequality_report(&Basis::build_auto(32, DomainSpec::lions()).unwrap());
        assert!(big.bounded_by(&small, 10.0));
        assert!(big.rows.iter().all(|r| (r.zeta_l2 - 1.0).abs() < 1e-8));
    }

    #[test]
    fn zero_run_audits_to_zero() {
        let b = friction10();
        let ops = Operators::assemble(b).unwrap();
        let cfg = SimConfig {
            nu: 0.1,
            t_final: 0.1,
            dt: 1e-2,
            modes: 10,
            forcing: vec![],
            initial: vec![],
            noise: None,
            save_stride: 1,
        };
        let tr = Simulator::new(&ops, cfg)
            .unwrap()
            .run(&NoisePath::zeros(10, 10, 1e-2))
            .unwrap();
        let audit = energy_audit(&tr).unwrap();
        assert!(audit.rows.iter().all(|r| r.residual == 0.0));
        assert_eq!(audit.relative_residual(), 0.0);
    }

    fn decay_residual(dt: f64) -> f64 {
        let b = friction10();
        let ops = Operators::assemble(b).unwrap();
        let k0 = b.pairs().iter().position(|p| p.n == 0).unwrap();
        let mut init = vec![0.0; 10];
        init[k0] = 1.0;
        let cfg = SimConfig {
            nu: 0.2,
            t_final: 1.0,
            dt,
            modes: 10,
            forcing: vec![],
            initial: init,
            noise: None,
            save_stride: 10,
        };
        let steps = cfg.steps();
        let tr = Simulator::new(&ops, cfg)
            .unwrap()
            .run(&NoisePath::zeros(10, steps, dt))
            .unwrap();
        let audit = energy_audit(&tr).unwrap();
        assert_eq!(audit.rows[0].residual, 0.0);
        audit.final_residual().abs()
    }

    #[test]
    fn decay_audit_converges() {
        let r: Vec<f64> = [4e-3, 2e-3, 1e-3].iter().map(|&dt| decay_residual(dt)).collect();
        for w in r.windows(2) {
            let order = (w[0] / w[1]).log2();
            assert!(order >= 0.8, "{r:?}");
        }
    }

    #[test]
    fn audit_is_stride_invariant() {
        let b = friction10();
        let ops = Operators::assemble(b).unwrap();
        let mut cfg = SimConfig {
            nu: 0.05,
            t_final: 0.2,
            dt: 1e-3,
            modes: 10,
            forcing: vec![],
            initial: (0..10).map(|i| 0.2 * (i as f64).cos()).collect(),
            noise: Some(NoiseSpec {
                m: 5,
                modes: 10,
                seed: 11,
                dt: 1e-3,
                steps: 200,
            }),
            save_stride: 1,
        };
        let path = sample_path(&cfg.noise_spec().unwrap()).unwrap();
        let full = energy_audit(&Simulator::new(&ops, cfg.clone()).unwrap().run(&path).unwrap()).unwrap();
        cfg.save_stride = 9;
        let thin = energy_audit(&Simulator::new(&ops, cfg).unwrap().run(&path).unwrap()).unwrap();
        for row in &thin.rows {
            assert_eq!(row, &full.rows[row.step]);
        }
    }
}
