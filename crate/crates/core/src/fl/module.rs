use crate::arith::{Ctx, Zq};
use crate::error::{Error, Result};
use crate::gradmod::{FPModule, GradedModule, Mat, ModuleMap};
use crate::report::Report;

/// Effective Fontaine-Laffaille data: a graded module with σ-semilinear
/// φ'_i: F^i -> F^0, stored as matrices applied to σ of the coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FLModule {
    base: GradedModule,
    phi: Vec<Mat>,
}

/// Which precision regime certifies the fiber isomorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Certification {
    ModP,
    Torsion,
    Free,
}

impl FLModule {
    /// Checks shapes and well-definedness of each φ'_i, not the FL conditions.
    pub fn new(base: GradedModule, phi: Vec<Mat>) -> Result<Self> {
        if phi.len() != base.wmax() + 1 {
            return Err(Error::Dimension(format!("{} phi matrices for window [0, {}]", phi.len(), base.wmax())));
        }
        let f0 = base.piece(0);
        let phi = phi
            .into_iter()
            .enumerate()
            .map(|(i, m)| {
                crate::gradmod::check_well_defined(&base.piece(i as i64), &f0, &m).map_err(|e| match e {
                    Error::Dimension(s) => Error::Dimension(format!("phi {i}: {s}")),
                    Error::IllDefined(s) => Error::IllDefined(format!("phi {i}: {s}")),
                    e => e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FLModule { base, phi })
    }

    pub fn zero(ctx: &Ctx) -> Self {
        FLModule { base: GradedModule::zero(ctx), phi: vec![Mat::zeros(ctx, 0, 0)] }
    }

    pub fn ctx(&self) -> &Ctx {
        self.base.ctx()
    }

    pub fn base(&self) -> &GradedModule {
        &self.base
    }

    pub fn wmax(&self) -> usize {
        self.base.wmax()
    }

    pub fn piece(&self, i: i64) -> FPModule {
        self.base.piece(i)
    }

    pub fn vminus(&self, i: i64) -> ModuleMap {
        self.base.vminus(i)
    }

    /// φ'_i, zero above the window.
    pub fn phi(&self, i: usize) -> Mat {
        match self.phi.get(i) {
            Some(m) => m.clone(),
            None => Mat::zeros(self.ctx(), self.piece(0).ngens(), 0),
        }
    }

    pub fn phis(&self) -> &[Mat] {
        &self.phi
    }

    /// [φ'_0 | φ'_1 | ... | φ'_wmax]
    pub fn phi_total(&self) -> Mat {
        let parts: Vec<&Mat> = self.phi.iter().collect();
        Mat::hstack(self.ctx(), self.piece(0).ngens(), &parts)
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    pub fn killed_by_p(&self) -> bool {
        self.base.killed_by_p()
    }

    /// Pads the window with zero pieces.
    pub fn padded(&self, w: usize) -> FLModule {
        let base = self.base.padded(w);
        let n0 = self.piece(0).ngens();
        let mut phi = self.phi.clone();
        while phi.len() < w + 1 {
            phi.push(Mat::zeros(self.ctx(), n0, 0));
        }
        FLModule { base, phi }
    }

    /// Drops trailing zero pieces.
    pub fn trimmed(&self) -> FLModule {
        let base = self.base.trimmed();
        let phi = self.phi[..=base.wmax()].to_vec();
        FLModule { base, phi }
    }

    pub fn direct_sum(&self, other: &FLModule) -> FLModule {
        let w = self.wmax().max(other.wmax());
        let (a, b) = (self.padded(w), other.padded(w));
        let base = a.base.direct_sum(&b.base);
        let ctx = self.ctx();
        let phi = (0..=w).map(|i| Mat::block_diag(ctx, &[&a.phi[i], &b.phi[i]])).collect();
        FLModule { base, phi }
    }

    fn certification(&self) -> Result<Certification> {
        let n = self.ctx().precision();
        let pieces = self.base.pieces();
        if pieces.iter().all(FPModule::killed_by_p) {
            Ok(Certification::ModP)
        } else if pieces.iter().all(|m| m.exps().iter().all(|&e| e < n)) {
            Ok(Certification::Torsion)
        } else if pieces.iter().all(FPModule::is_full) {
            Ok(Certification::Free)
        } else {
            Err(Error::NotNDetermined(format!(
                "pieces mix full summands with torsion at precision {n}; raise N until the torsion exponents drop below it"
            )))
        }
    }

    /// φ'_{i-1} σ(v-) - p φ'_i, reduced into F^0.
    pub fn compatibility_defect(&self, i: usize) -> Mat {
        let f0 = self.piece(0);
        let lhs = self.phi(i - 1).mul(&self.vminus(i as i64).matrix().frobenius());
        let rhs = self.phi(i).scale(&Zq::p_power(self.ctx(), 1));
        lhs.sub(&rhs).reduce_rows(f0.exps())
    }

    /// The linearized fiber map F^*(M_{v- = p}) -> F^0 as a ModuleMap, if it is well defined.
    pub fn fiber_map(&self) -> Result<ModuleMap> {
        let d = self.base.fiber_differential(&Zq::p_power(self.ctx(), 1));
        let sd = ModuleMap::new(d.source().clone(), d.target().clone(), d.matrix().frobenius())?;
        let coker = sd.cokernel();
        let psi = self.phi_total().mul(&coker.section);
        ModuleMap::new(coker.module().clone(), self.piece(0), psi)
    }

    /// Full verdict. Refuses with NotNDetermined when precision cannot certify.
    pub fn validate(&self) -> Result<Report> {
        let cert = self.certification()?;
        let mut r = Report::new("fl_validate");
        for i in 1..=self.wmax() {
            let defect = self.compatibility_defect(i);
            r.check(format!("phi compatibility degree {i}"), defect.is_zero(), if defect.is_zero() { String::new() } else { format!("defect {defect}") });
        }
        match self.fiber_map() {
            Ok(psi) => {
                let iso = psi.is_isomorphism();
                r.check("fiber isomorphism", iso, format!("{:?}: {} -> {}", cert, psi.source(), psi.target()));
            }
            Err(e) => r.check("fiber isomorphism", false, format!("fiber map not well defined: {e}")),
        }
        if cert == Certification::ModP {
            let bad = (1..=self.wmax()).find(|&i| !self.vminus(i as i64).is_injective());
            r.check("split injection", bad.is_none(), bad.map(|i| format!("v- not injective in degree {i}")).unwrap_or_default());
            let f0 = self.piece(0);
            let total = FPModule::direct_sum(self.ctx(), &self.base.pieces().iter().collect::<Vec<_>>());
            let span = ModuleMap::new(total, f0, self.phi_total()).map(|m| m.is_surjective()).unwrap_or(false);
            r.check("sum of phi images is F^0", span, if span { String::new() } else { "Σ im(φ_i) ≠ F^0".into() });
        }
        let p = self.ctx().p() as i64;
        for a in [0, 1, p] {
            let h = self.base.graded_fiber_at(a).h_minus1;
            r.check(format!("fiber H^-1 vanishes at {a}"), h.source().is_zero(), h.source().to_string());
        }
        Ok(r)
    }

    pub fn is_valid(&self) -> Result<bool> {
        Ok(self.validate()?.passed())
    }

    /// M/pM.
    pub fn reduce_mod_p(&self) -> FLModule {
        let base = self.base.reduce_mod_p();
        let one = vec![1; self.piece(0).ngens()];
        let phi = self.phi.iter().map(|m| m.reduce_rows(&one)).collect();
        FLModule { base, phi }
    }

    /// M{i}: F'^k = F^{k-i}, φ'_k = φ'_{k-i} for k >= i and p^{i-k} φ'_0 below.
    pub fn twist(&self, i: usize) -> FLModule {
        if i == 0 {
            return self.clone();
        }
        let base = self.base.shift(i);
        let mut phi: Vec<Mat> = (0..i).map(|k| self.phi[0].scale(&Zq::p_power(self.ctx(), (i - k) as u32))).collect();
        phi.extend(self.phi.iter().cloned());
        let f0 = self.piece(0);
        let phi = phi.into_iter().map(|m| m.reduce_rows(f0.exps())).collect();
        FLModule { base, phi }
    }
}

/// W{j} with φ'_j = u: free rank one in degrees 0..=j, φ'_{j-m} = p^m u.
pub fn tate_twist(ctx: &Ctx, j: usize, u: &Zq) -> Result<FLModule> {
    if !u.is_unit() {
        return Err(Error::NonUnit(u.valuation()));
    }
    line(ctx, j, u, FPModule::free(ctx, 1))
}

/// k{j}: the mod-p reduction of W{j} with φ'_j = 1.
pub fn unit_mod_p(ctx: &Ctx, j: usize) -> FLModule {
    line(ctx, j, &Zq::one(ctx), FPModule::mod_p(ctx, 1)).expect("rank one line")
}

fn line(ctx: &Ctx, j: usize, u: &Zq, piece: FPModule) -> Result<FLModule> {
    let pieces = vec![piece; j + 1];
    let vminus = vec![Mat::identity(ctx, 1); j];
    let base = GradedModule::from_matrices(pieces, vminus)?;
    let phi = (0..=j).map(|i| Mat::scalar(ctx, 1, &(u * &Zq::p_power(ctx, (j - i) as u32)))).collect();
    FLModule::new(base, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeContext;
    use crate::gradmod::WeightWindow;

    #[test]
    fn tate_twists_validate() {
        let c = PrimeContext::prime(5, 3).unwrap();
        for j in 0..4 {
            let w = tate_twist(&c, j, &Zq::from_u64(&c, 2)).unwrap();
            assert!(w.validate().unwrap().passed(), "W{{{j}}}");
            assert_eq!(w.base().weight_window(), WeightWindow::Bounded(j as i64, j as i64));
            assert!(unit_mod_p(&c, j).validate().unwrap().passed());
        }
        let one = Zq::one(&c);
        assert_eq!(tate_twist(&c, 0, &one).unwrap().twist(1), tate_twist(&c, 1, &one).unwrap());
        assert!(tate_twist(&c, 0, &Zq::from_u64(&c, 5)).is_err());
    }

    #[test]
    fn uncovered_piece_fails() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let m = unit_mod_p(&c, 0).direct_sum(&unit_mod_p(&c, 1));
        let mut phi = m.phis().to_vec();
        phi[1] = Mat::zeros(&c, 2, 1);
        let bad = FLModule::new(m.base().clone(), phi).unwrap();
        let r = bad.validate().unwrap();
        assert!(r.failures().any(|f| f.name == "sum of phi images is F^0"));
    }

    #[test]
    fn non_injective_vminus_fails() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let k = FPModule::mod_p(&c, 1);
        let base = GradedModule::from_matrices(vec![k.clone(), k], vec![Mat::zeros(&c, 1, 1)]).unwrap();
        let m = FLModule::new(base, vec![Mat::identity(&c, 1), Mat::identity(&c, 1)]).unwrap();
        let r = m.validate().unwrap();
        assert!(r.failures().any(|f| f.name == "split injection"));
    }

    #[test]
    fn mixed_precision_is_refused() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let f0 = FPModule::new(&c, vec![1, 2]).unwrap();
        let base = GradedModule::from_matrices(vec![f0], vec![]).unwrap();
        let m = FLModule::new(base, vec![Mat::identity(&c, 2)]).unwrap();
        assert!(matches!(m.validate(), Err(Error::NotNDetermined(_))));
    }
}
