use super::FLModule;
use crate::error::{Error, Result};
use crate::gradmod::{GradedModule, Mat, ModuleMap};

/// Degreewise maps f_i: M^i -> N^i on the common window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FLMorphism {
    source: FLModule,
    target: FLModule,
    maps: Vec<ModuleMap>,
}

impl FLMorphism {
    /// Pads both modules to a common window and checks both commutation rules.
    pub fn new(source: &FLModule, target: &FLModule, matrices: Vec<Mat>) -> Result<Self> {
        let w = source.wmax().max(target.wmax());
        let (s, t) = (source.padded(w), target.padded(w));
        if matrices.len() != w + 1 {
            return Err(Error::Dimension(format!("{} matrices for window [0, {w}]", matrices.len())));
        }
        let maps = matrices
            .into_iter()
            .enumerate()
            .map(|(i, m)| ModuleMap::new(s.piece(i as i64), t.piece(i as i64), m))
            .collect::<Result<Vec<_>>>()?;
        let f = FLMorphism { source: s, target: t, maps };
        if let Some(e) = f.defect() {
            return Err(Error::Verification(e));
        }
        Ok(f)
    }

    pub fn zero(source: &FLModule, target: &FLModule) -> Self {
        let w = source.wmax().max(target.wmax());
        let (s, t) = (source.padded(w), target.padded(w));
        let maps = (0..=w as i64).map(|i| ModuleMap::zero(&s.piece(i), &t.piece(i))).collect();
        FLMorphism { source: s, target: t, maps }
    }

    pub fn identity(m: &FLModule) -> Self {
        let maps = (0..=m.wmax() as i64).map(|i| ModuleMap::identity(&m.piece(i))).collect();
        FLMorphism { source: m.clone(), target: m.clone(), maps }
    }

    pub fn source(&self) -> &FLModule {
        &self.source
    }

    pub fn target(&self) -> &FLModule {
        &self.target
    }

    pub fn maps(&self) -> &[ModuleMap] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &ModuleMap {
        &self.maps[i]
    }

    pub fn is_zero(&self) -> bool {
        self.maps.iter().all(ModuleMap::is_zero)
    }

    /// First failing commutation rule, if any.
    pub fn defect(&self) -> Option<String> {
        let (m, n) = (&self.source, &self.target);
        for i in 1..=m.wmax() {
            let lhs = self.maps[i - 1].compose(&m.vminus(i as i64));
            let rhs = n.vminus(i as i64).compose(&self.maps[i]);
            if lhs.is_err() || lhs != rhs {
                return Some(format!("f does not commute with v- in degree {i}"));
            }
        }
        let e0 = n.piece(0);
        for i in 0..=m.wmax() {
            let lhs = self.maps[0].matrix().mul(&m.phi(i)).reduce_rows(e0.exps());
            let rhs = n.phi(i).mul(&self.maps[i].matrix().frobenius()).reduce_rows(e0.exps());
            if lhs != rhs {
                return Some(format!("f does not commute with phi in degree {i}"));
            }
        }
        None
    }

    pub fn compose(&self, g: &FLMorphism) -> Result<FLMorphism> {
        if g.target.trimmed() != self.source.trimmed() {
            return Err(Error::Dimension("morphisms are not composable".into()));
        }
        let w = g.source.wmax().max(self.target.wmax()).max(self.maps.len() - 1).max(g.maps.len() - 1);
        let a = self.padded(w);
        let b = g.padded(w);
        let maps = (0..=w).map(|i| a.maps[i].compose(&b.maps[i])).collect::<Result<Vec<_>>>()?;
        Ok(FLMorphism { source: b.source, target: a.target, maps })
    }

    pub fn add(&self, other: &FLMorphism) -> Result<FLMorphism> {
        let maps = self.maps.iter().zip(&other.maps).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        Ok(FLMorphism { source: self.source.clone(), target: self.target.clone(), maps })
    }

    fn padded(&self, w: usize) -> FLMorphism {
        let (s, t) = (self.source.padded(w), self.target.padded(w));
        let mut maps = self.maps.clone();
        for i in maps.len()..=w {
            maps.push(ModuleMap::zero(&s.piece(i as i64), &t.piece(i as i64)));
        }
        FLMorphism { source: s, target: t, maps }
    }

    /// Degreewise kernel with the induced v- and φ'; returns the inclusion.
    pub fn kernel(&self) -> Result<FLMorphism> {
        let m = &self.source;
        let w = m.wmax();
        let incl: Vec<ModuleMap> = self.maps.iter().map(ModuleMap::kernel).collect();
        let pieces: Vec<_> = incl.iter().map(|k| k.source().clone()).collect();
        let mut vminus = Vec::with_capacity(w);
        for i in 1..=w {
            let x = m.vminus(i as i64).compose(&incl[i])?;
            vminus.push(incl[i - 1].lift_through(&x)?);
        }
        let base = GradedModule::new(pieces, vminus)?;
        let mut phi = Vec::with_capacity(w + 1);
        for (i, inc) in incl.iter().enumerate() {
            let x = ModuleMap::new(inc.source().clone(), m.piece(0), m.phi(i).mul(&inc.matrix().frobenius()))?;
            phi.push(incl[0].lift_through(&x)?.matrix().clone());
        }
        let k = FLModule::new(base, phi)?;
        let maps = incl.iter().map(|i| i.matrix().clone()).collect();
        FLMorphism::new(&k, m, maps)
    }

    /// Degreewise cokernel with the induced v- and φ'; returns the projection.
    pub fn cokernel(&self) -> Result<FLMorphism> {
        let n = &self.target;
        let w = n.wmax();
        let cok: Vec<_> = self.maps.iter().map(ModuleMap::cokernel).collect();
        let pieces: Vec<_> = cok.iter().map(|c| c.module().clone()).collect();
        let mut vminus = Vec::with_capacity(w);
        for i in 1..=w {
            let m = cok[i - 1].projection.matrix().mul(n.vminus(i as i64).matrix()).mul(&cok[i].section);
            vminus.push(m);
        }
        let base = GradedModule::from_matrices(pieces, vminus)?;
        let pi0 = cok[0].projection.matrix();
        let phi = (0..=w).map(|i| pi0.mul(&n.phi(i)).mul(&cok[i].section.frobenius())).collect();
        let c = FLModule::new(base, phi)?;
        let maps = cok.iter().map(|c| c.projection.matrix().clone()).collect();
        FLMorphism::new(n, &c, maps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{PrimeContext, Zq};
    use crate::fl::{tate_twist, unit_mod_p};

    #[test]
    fn cokernel_of_p_is_unit_mod_p() {
        let c = PrimeContext::prime(3, 3).unwrap();
        let w0 = tate_twist(&c, 0, &Zq::one(&c)).unwrap();
        let f = FLMorphism::new(&w0, &w0, vec![Mat::scalar(&c, 1, &Zq::from_u64(&c, 3))]).unwrap();
        let q = f.cokernel().unwrap();
        assert_eq!(q.target(), &unit_mod_p(&c, 0));
        // at precision 3^3, multiplication by 3 kills 9·Z/27
        assert_eq!(f.kernel().unwrap().source().piece(0).elementary_divisors(), vec![1]);
    }

    #[test]
    fn zero_map_kernel_and_cokernel() {
        let c = PrimeContext::prime(5, 2).unwrap();
        let a = tate_twist(&c, 1, &Zq::one(&c)).unwrap();
        let b = tate_twist(&c, 2, &Zq::one(&c)).unwrap();
        let z = FLMorphism::zero(&a, &b);
        assert_eq!(z.kernel().unwrap().source().trimmed(), a);
        assert_eq!(z.cokernel().unwrap().target().trimmed(), b);
    }

    #[test]
    fn kernel_of_projection() {
        let c = PrimeContext::prime(3, 2).unwrap();
        let one = Zq::one(&c);
        let w0 = tate_twist(&c, 0, &one).unwrap();
        let w1 = tate_twist(&c, 1, &one).unwrap();
        let sum = w0.direct_sum(&w1);
        let proj = vec![Mat::from_i64(&c, &[vec![0, 1]], 2).unwrap(), Mat::from_i64(&c, &[vec![1]], 1).unwrap()];
        let f = FLMorphism::new(&sum, &w1, proj).unwrap();
        let k = f.kernel().unwrap();
        assert!(k.source().validate().unwrap().passed());
        assert_eq!(k.source().trimmed().base().weight_window(), w0.base().weight_window());
        assert!(f.compose(&k).unwrap().is_zero());
    }
}
