use std::f64::consts::FRAC_1_SQRT_2;

use fock_core::{cr, Complex64, FockState, ModeId, OccupationVector, Pol, Registry};

use crate::circuit::{Source, TargetKind, TargetSpec};
use crate::CircuitError;

/// Level k of a quadbit on ports (k1, k2): 0 → H k1, 1 → V k1, 2 → H k2, 3 → V k2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadbitCodec {
    pub modes: [ModeId; 4],
}

impl QuadbitCodec {
    pub fn new(k1: u32, k2: u32) -> Self {
        QuadbitCodec { modes: [ModeId::h(k1), ModeId::v(k1), ModeId::h(k2), ModeId::v(k2)] }
    }

    pub fn registry(&self) -> Registry {
        Registry::new(self.modes).expect("distinct ports")
    }

    pub fn encode(&self, level: usize) -> FockState {
        FockState::from_terms(&self.registry(), [(OccupationVector::from_modes(&[self.modes[level]]), cr(1.0))])
            .expect("codec modes")
    }

    pub fn encode_vector(&self, amps: &[Complex64; 4]) -> FockState {
        FockState::from_terms(
            &self.registry(),
            (0..4).map(|k| (OccupationVector::from_modes(&[self.modes[k]]), amps[k])),
        )
        .expect("codec modes")
    }

    pub fn decode(&self, state: &FockState) -> Result<[Complex64; 4], CircuitError> {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        if state.is_empty() {
            return Err(CircuitError::Encoding("empty support".into()));
        }
        for (occ, a) in state.terms() {
            if occ.total() != 1 {
                return Err(CircuitError::Encoding(format!("{} photons in a term", occ.total())));
            }
            let (m, _) = occ.iter().next().expect("one photon");
            let k = self
                .modes
                .iter()
                .position(|&x| x == m)
                .ok_or_else(|| CircuitError::Encoding(format!("photon in {m} outside the codec")))?;
            out[k] = *a;
        }
        Ok(out)
    }
}

/// Order-4 DFT: column i is |+_i⟩ = (1/2) Σ_k e^{i·iπk/2} |k⟩.
pub fn quadbit_fourier() -> [[Complex64; 4]; 4] {
    let mut f = [[Complex64::new(0.0, 0.0); 4]; 4];
    let powers = [cr(1.0), Complex64::new(0.0, 1.0), cr(-1.0), Complex64::new(0.0, -1.0)];
    for (k, row) in f.iter_mut().enumerate() {
        for (i, x) in row.iter_mut().enumerate() {
            *x = powers[(i * k) % 4] * 0.5;
        }
    }
    f
}

/// Product over photons, each given as a list of (level mode, amplitude), summed over `terms`.
fn from_products(spatial: &[u32], terms: Vec<(Vec<ModeId>, Complex64)>) -> FockState {
    let reg = Registry::from_spatial(spatial.iter().copied()).expect("distinct modes");
    FockState::from_terms(&reg, terms.into_iter().map(|(m, a)| (OccupationVector::from_modes(&m), a)))
        .expect("modes in registry")
}

fn level_mode(ports: &[u32], k: usize) -> ModeId {
    ModeId::new(ports[k / 2], Pol::BOTH[k % 2])
}

/// Σ over i of Π_p (column vector v_p(i)) with overall factor; v_p(i) is a list of (level, amp).
fn quad_sum(
    photons: &[Vec<u32>],
    per_photon: impl Fn(usize, usize) -> Vec<(usize, Complex64)>,
    scale: f64,
) -> Vec<(Vec<ModeId>, Complex64)> {
    let mut out = vec![];
    for i in 0..4 {
        let mut partial: Vec<(Vec<ModeId>, Complex64)> = vec![(vec![], cr(scale))];
        for (p, ports) in photons.iter().enumerate() {
            let mut next = vec![];
            for (ms, a) in &partial {
                for (k, b) in per_photon(p, i) {
                    let mut m2 = ms.clone();
                    m2.push(level_mode(ports, k));
                    next.push((m2, a * b));
                }
            }
            partial = next;
        }
        out.extend(partial);
    }
    out
}

fn plus_levels(i: usize) -> Vec<(usize, Complex64)> {
    let f = quadbit_fourier();
    (0..4).map(|k| (k, f[k][i])).collect()
}

pub fn target_state(t: &TargetSpec) -> FockState {
    let m = &t.modes;
    let h = ModeId::h;
    let v = ModeId::v;
    let r = FRAC_1_SQRT_2;
    match t.kind {
        TargetKind::Bell => from_products(m, vec![(vec![h(m[0]), h(m[1])], cr(r)), (vec![v(m[0]), v(m[1])], cr(r))]),
        TargetKind::PhiMinus => {
            from_products(m, vec![(vec![h(m[0]), h(m[1])], cr(r)), (vec![v(m[0]), v(m[1])], cr(-r))])
        }
        TargetKind::PsiPlus => from_products(m, vec![(vec![h(m[0]), v(m[1])], cr(r)), (vec![v(m[0]), h(m[1])], cr(r))]),
        TargetKind::Ghz => from_products(
            m,
            vec![(m.iter().map(|&x| h(x)).collect(), cr(r)), (m.iter().map(|&x| v(x)).collect(), cr(r))],
        ),
        TargetKind::Hes => from_products(
            m,
            vec![
                (vec![h(m[0]), h(m[2])], cr(0.5)),
                (vec![v(m[0]), v(m[2])], cr(0.5)),
                (vec![h(m[1]), h(m[3])], cr(0.5)),
                (vec![v(m[1]), v(m[3])], cr(0.5)),
            ],
        ),
        TargetKind::QuadGhz => {
            let ph = t.photons();
            from_products(m, quad_sum(&ph, |_, i| vec![(i, cr(1.0))], 0.5))
        }
        TargetKind::Qdc2 => {
            let ph = t.photons();
            from_products(m, quad_sum(&ph, |p, i| if p == 0 { vec![(i, cr(1.0))] } else { plus_levels(i) }, 0.5))
        }
        TargetKind::Qdc3 | TargetKind::Qdc4 => {
            let ph = t.photons();
            from_products(m, quad_sum(&ph, |p, i| if p == 1 { vec![(i, cr(1.0))] } else { plus_levels(i) }, 0.5))
        }
        TargetKind::TwoBell => {
            let mut terms = vec![];
            for (a, b) in [(h(m[0]), h(m[1])), (v(m[0]), v(m[1]))] {
                for (c, d) in [(h(m[2]), h(m[3])), (v(m[2]), v(m[3]))] {
                    terms.push((vec![a, b, c, d], cr(0.5)));
                }
            }
            from_products(m, terms)
        }
        TargetKind::BellMix => {
            let phi = |x: u32, y: u32| vec![(vec![h(x), h(y)], r), (vec![v(x), v(y)], r)];
            let psi = |x: u32, y: u32| vec![(vec![h(x), v(y)], r), (vec![v(x), h(y)], r)];
            let mut terms = vec![];
            for (f1, f2) in [(phi(m[0], m[1]), phi(m[2], m[3])), (psi(m[0], m[1]), psi(m[2], m[3]))] {
                for (a, x) in &f1 {
                    for (b, y) in &f2 {
                        terms.push(([a.clone(), b.clone()].concat(), cr(x * y * r)));
                    }
                }
            }
            from_products(m, terms)
        }
    }
}

pub fn source_state(s: &Source) -> FockState {
    let h = ModeId::h;
    let v = ModeId::v;
    let m = s.modes();
    match s {
        Source::Bell(a, b) => target_state(&TargetSpec { kind: TargetKind::Bell, modes: vec![*a, *b] }),
        Source::Ghz(g) => target_state(&TargetSpec { kind: TargetKind::Ghz, modes: g.clone() }),
        Source::Hes(x) => target_state(&TargetSpec { kind: TargetKind::Hes, modes: x.to_vec() }),
        Source::Qdc3(x) => target_state(&TargetSpec { kind: TargetKind::QuadGhz, modes: x.to_vec() }),
        Source::Sp(list) => {
            let modes: Vec<ModeId> = list.iter().map(|&(x, p)| if p == Pol::H { h(x) } else { v(x) }).collect();
            from_products(&m, vec![(modes, cr(1.0))])
        }
        Source::Vac(_) => from_products(&m, vec![(vec![], cr(1.0))]),
    }
}

/// Tensor product of all sources, padded with vacuum over `spatial`.
pub fn initial_state(sources: &[Source], spatial: &[u32]) -> Result<FockState, CircuitError> {
    let mut s: Option<FockState> = None;
    for src in sources {
        let part = source_state(src);
        s = Some(match s {
            None => part,
            Some(acc) => acc.tensor(&part)?,
        });
    }
    let full = Registry::from_spatial(spatial.iter().copied())?;
    Ok(match s {
        Some(st) => st.extend_registry(&full),
        None => FockState::vacuum(&full)?,
    })
}
