//! Reducing and reconstructing projections derived from a cross Gramian.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error, Result};
use crate::matlib::{csv, magnitude_order, svd, symmetric_eig, Matrix};
use crate::system::LtiSystem;

/// Relative asymmetry above which the eigendecomposition route is refused.
const EVD_SYMMETRY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionKind {
    EvdBalancing,
    SvdApprox,
    DirectTruncationLeft,
    DirectTruncationRight,
}

impl ProjectionKind {
    pub const ALL: [ProjectionKind; 4] = [
        ProjectionKind::EvdBalancing,
        ProjectionKind::SvdApprox,
        ProjectionKind::DirectTruncationLeft,
        ProjectionKind::DirectTruncationRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProjectionKind::EvdBalancing => "evd-balancing",
            ProjectionKind::SvdApprox => "svd-approx",
            ProjectionKind::DirectTruncationLeft => "direct-truncation-left",
            ProjectionKind::DirectTruncationRight => "direct-truncation-right",
        }
    }
}

impl std::str::FromStr for ProjectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProjectionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown projection kind {s:?}")))
    }
}

/// Truncation ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ranking {
    #[default]
    Scores,
    Davidson,
}

/// Row `i` of `reducing` and column `i` of `reconstructing` belong to
/// `scores[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub reducing: Matrix,
    pub reconstructing: Matrix,
    pub scores: Vec<f64>,
    pub kind: ProjectionKind,
    /// All scores are zero.
    pub degenerate: bool,
}

impl Projection {
    fn new(reducing: Matrix, reconstructing: Matrix, scores: Vec<f64>, kind: ProjectionKind) -> Self {
        let degenerate = scores.iter().all(|&s| s == 0.0);
        Self { reducing, reconstructing, scores, kind, degenerate }
    }

    pub fn max_order(&self) -> usize {
        self.scores.len()
    }

    /// Reorders the basis by descending `keys` (ties as for eigenvalues),
    /// which become the new scores.
    pub fn reranked(&self, keys: &[f64]) -> Result<Projection> {
        if keys.len() != self.max_order() {
            return shape_err(format!("{} ranking keys for {} basis vectors", keys.len(), self.max_order()));
        }
        let order = magnitude_order(keys);
        let n = self.reconstructing.rows();
        let r = Matrix::from_fn(order.len(), n, |i, j| self.reducing[(order[i], j)]);
        let s = Matrix::from_fn(n, order.len(), |i, j| self.reconstructing[(i, order[j])]);
        let scores = order.iter().map(|&i| keys[i].abs()).collect();
        Ok(Projection::new(r, s, scores, self.kind))
    }
}

fn check_square(w: &Matrix) -> Result<()> {
    if !w.is_square() {
        return shape_err(format!("Gramian must be square, got {:?}", w.shape()));
    }
    w.check_finite("Gramian")
}

/// `S = V`, `R = Vᵀ` from the eigendecomposition of a symmetric Gramian.
pub fn balancing_projection_evd(w: &Matrix) -> Result<Projection> {
    check_square(w)?;
    let asym = w.relative_asymmetry();
    if asym > EVD_SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = symmetric_eig(w)?;
    let scores = eig.values.iter().map(|v| v.abs()).collect();
    Ok(Projection::new(eig.vectors.transpose(), eig.vectors, scores, ProjectionKind::EvdBalancing))
}

/// `S = U`, `R = V` from `W = UΣV`.
pub fn approx_balancing_svd(w: &Matrix) -> Result<Projection> {
    check_square(w)?;
    let d = svd(w);
    Ok(Projection::new(d.v, d.u, d.sigma, ProjectionKind::SvdApprox))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Orthogonal projection onto the leading left (`S = U`, `R = Uᵀ`) or right
/// (`S = Vᵀ`, `R = V`) singular vectors.
pub fn direct_truncation(w: &Matrix, side: Side) -> Result<Projection> {
    check_square(w)?;
    let d = svd(w);
    Ok(match side {
        Side::Left => Projection::new(d.u.transpose(), d.u, d.sigma, ProjectionKind::DirectTruncationLeft),
        Side::Right => Projection::new(d.v.clone(), d.v.transpose(), d.sigma, ProjectionKind::DirectTruncationRight),
    })
}

pub fn build_projection(w: &Matrix, kind: ProjectionKind) -> Result<Projection> {
    match kind {
        ProjectionKind::EvdBalancing => balancing_projection_evd(w),
        ProjectionKind::SvdApprox => approx_balancing_svd(w),
        ProjectionKind::DirectTruncationLeft => direct_truncation(w, Side::Left),
        ProjectionKind::DirectTruncationRight => direct_truncation(w, Side::Right),
    }
}

/// `d_i = ‖row_i(B̃)‖₂·‖col_i(C̃)‖₂·scores_i` for a system already in the
/// projected coordinates.
pub fn davidson_scores(sys_balanced: &LtiSystem, scores: &[f64]) -> Result<Vec<f64>> {
    let n = sys_balanced.states();
    if scores.len() != n {
        return shape_err(format!("{} scores for a system with {n} states", scores.len()));
    }
    let b = sys_balanced.b();
    let c = sys_balanced.c();
    Ok((0..n)
        .map(|i| {
            let bn = crate::matlib::norm2(b.row(i));
            let cn = (0..c.rows()).map(|q| c[(q, i)] * c[(q, i)]).sum::<f64>().sqrt();
            bn * cn * scores[i]
        })
        .collect())
}

/// Leading `n` rows of `R` and columns of `S`.
pub fn truncate(p: &Projection, n: usize) -> Result<(Matrix, Matrix)> {
    let max = p.max_order();
    if n == 0 || n > max {
        return Err(Error::OrderOutOfRange { n, max });
    }
    Ok((p.reducing.leading_rows(n), p.reconstructing.leading_columns(n)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rom {
    pub sys: LtiSystem,
    pub order: usize,
    pub kind: Option<ProjectionKind>,
    pub parent_n: usize,
}

#[derive(Serialize, Deserialize)]
struct RomSidecar {
    order: usize,
    kind: Option<ProjectionKind>,
    parent_n: usize,
}

impl Rom {
    /// The ROM of order `n` obtained from the leading blocks of this one.
    /// Valid because truncation keeps leading rows of `R` and columns of `S`.
    pub fn leading(&self, n: usize) -> Result<Rom> {
        if n == 0 || n > self.order {
            return Err(Error::OrderOutOfRange { n, max: self.order });
        }
        let sys = LtiSystem::new(
            self.sys.a().block(0, 0, n, n),
            self.sys.b().leading_rows(n),
            self.sys.c().leading_columns(n),
        )?;
        Ok(Rom { sys, order: n, kind: self.kind, parent_n: self.parent_n })
    }

    /// Writes `A.csv`, `B.csv`, `C.csv` and `rom.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        csv::save_matrix(dir.join("A.csv"), self.sys.a())?;
        csv::save_matrix(dir.join("B.csv"), self.sys.b())?;
        csv::save_matrix(dir.join("C.csv"), self.sys.c())?;
        let side = RomSidecar { order: self.order, kind: self.kind, parent_n: self.parent_n };
        fs::write(dir.join("rom.json"), serde_json::to_string_pretty(&side)? + "\n")?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Rom> {
        let dir = dir.as_ref();
        let side: RomSidecar = serde_json::from_str(&fs::read_to_string(dir.join("rom.json"))?)?;
        let sys = LtiSystem::new(
            csv::load_matrix(dir.join("A.csv"))?,
            csv::load_matrix(dir.join("B.csv"))?,
            csv::load_matrix(dir.join("C.csv"))?,
        )?;
        if sys.states() != side.order {
            return Err(Error::Parse(format!(
                "rom.json order {} but A is {}×{}",
                side.order,
                sys.states(),
                sys.states()
            )));
        }
        Ok(Rom { sys, order: side.order, kind: side.kind, parent_n: side.parent_n })
    }
}

/// `A_r = R A S`, `B_r = R B`, `C_r = C S`.
pub fn reduce_system(sys: &LtiSystem, r: &Matrix, s: &Matrix) -> Result<Rom> {
    let n = sys.states();
    if r.cols() != n || s.rows() != n || r.rows() != s.cols() {
        return shape_err(format!("projection R {:?}, S {:?} incompatible with N={n}", r.shape(), s.shape()));
    }
    let sys_r = LtiSystem::new(r.matmul(&sys.a().matmul(s)), r.matmul(sys.b()), sys.c().matmul(s))?;
    Ok(Rom { sys: sys_r, order: r.rows(), kind: None, parent_n: n })
}

/// Truncates `p` to order `n` and reduces `sys`.
pub fn reduce_with(sys: &LtiSystem, p: &Projection, n: usize) -> Result<Rom> {
    let (r, s) = truncate(p, n)?;
    let mut rom = reduce_system(sys, &r, &s)?;
    rom.kind = Some(p.kind);
    Ok(rom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize, seed: u64) -> Matrix {
        let mut rng = crate::benchmark::SeededRng::new(seed);
        let g = Matrix::from_fn(n, n, |_, _| rng.gaussian());
        (&g + &g.transpose()).scale(0.5)
    }

    fn dev_from_identity(m: &Matrix) -> f64 {
        (m - &Matrix::identity(m.rows())).frobenius_norm()
    }

    #[test]
    fn evd_on_diagonal() {
        let p = balancing_projection_evd(&Matrix::from_diag(&[4.0, 1.0])).unwrap();
        assert_eq!(p.reconstructing, Matrix::identity(2));
        assert_eq!(p.scores, vec![4.0, 1.0]);
        let p = balancing_projection_evd(&Matrix::from_diag(&[1.0, 4.0])).unwrap();
        assert_eq!(p.reconstructing, Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]));
        assert_eq!(p.scores, vec![4.0, 1.0]);
    }

    #[test]
    fn evd_tie_broken_by_sign() {
        let p = balancing_projection_evd(&Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]])).unwrap();
        assert_eq!(p.scores, vec![1.0, 1.0]);
        let s = &p.reconstructing;
        let r = 0.5f64.sqrt();
        // First column is the +1 eigenvector.
        assert!((s[(0, 0)] * s[(1, 0)] - 0.5).abs() < 1e-14);
        assert!((s[(0, 1)] * s[(1, 1)] + 0.5).abs() < 1e-14);
        assert!((s[(0, 0)].abs() - r).abs() < 1e-14);
    }

    #[test]
    fn evd_rejects_asymmetric() {
        let w = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(balancing_projection_evd(&w), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn svd_matches_evd_for_spd() {
        let g = sym(6, 1);
        let w = g.matmul(&g).scale(1.0);
        let e = balancing_projection_evd(&w).unwrap();
        let s = approx_balancing_svd(&w).unwrap();
        for i in 0..6 {
            assert!((e.scores[i] - s.scores[i]).abs() <= 1e-12 * e.scores[0]);
            let dot: f64 = (0..6).map(|k| e.reconstructing[(k, i)] * s.reconstructing[(k, i)]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-10);
        }
        assert!(dev_from_identity(&s.reducing.matmul(&s.reconstructing)) < 1e-10);
    }

    #[test]
    fn svd_of_negative_diagonal() {
        let p = approx_balancing_svd(&Matrix::from_diag(&[-3.0, 1.0])).unwrap();
        assert_eq!(p.scores, vec![3.0, 1.0]);
        assert!((p.reconstructing[(0, 0)] * p.reducing[(0, 0)] + 1.0).abs() < 1e-15);
        assert!((p.reconstructing[(1, 1)] * p.reducing[(1, 1)] - 1.0).abs() < 1e-15);
        assert!(!p.degenerate);
    }

    #[test]
    fn zero_gramian_is_degenerate() {
        for kind in ProjectionKind::ALL {
            let p = build_projection(&Matrix::zeros(3, 3), kind).unwrap();
            assert!(p.degenerate);
            assert!(p.scores.iter().all(|&s| s == 0.0));
        }
    }

    #[test]
    fn direct_truncation_properties() {
        let p = direct_truncation(&Matrix::from_diag(&[4.0, 1.0]), Side::Left).unwrap();
        assert_eq!(p.reconstructing, Matrix::identity(2));
        let mut rng = crate::benchmark::SeededRng::new(3);
        let w = Matrix::from_fn(8, 8, |_, _| rng.gaussian());
        for side in [Side::Left, Side::Right] {
            let p = direct_truncation(&w, side).unwrap();
            assert_eq!(p.reconstructing, p.reducing.transpose());
            assert!(dev_from_identity(&p.reducing.matmul_t(&p.reducing)) < 1e-10);
        }
    }

    #[test]
    fn direct_truncation_sides_agree_for_symmetric() {
        let w = sym(7, 9);
        let l = direct_truncation(&w, Side::Left).unwrap();
        let r = direct_truncation(&w, Side::Right).unwrap();
        for i in 0..7 {
            let dot: f64 = (0..7).map(|k| l.reconstructing[(k, i)] * r.reconstructing[(k, i)]).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-9, "column {i}: {dot}");
        }
    }

    #[test]
    fn davidson_examples() {
        let sys =
            LtiSystem::new(Matrix::from_diag(&[-1.0]), Matrix::from_diag(&[2.0]), Matrix::from_diag(&[3.0])).unwrap();
        assert_eq!(davidson_scores(&sys, &[0.5]).unwrap(), vec![3.0]);
        let sys = LtiSystem::new(
            Matrix::from_diag(&[-1.0, -2.0]),
            Matrix::from_rows(&[[0.0, 0.0], [0.6, 0.8]]),
            Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]),
        )
        .unwrap();
        assert_eq!(davidson_scores(&sys, &[4.0, 2.0]).unwrap(), vec![0.0, 2.0]);
        assert!(davidson_scores(&sys, &[1.0]).is_err());
    }

    #[test]
    fn rerank_reorders_basis() {
        let p = balancing_projection_evd(&Matrix::from_diag(&[4.0, 1.0])).unwrap();
        let q = p.reranked(&[0.5, 2.0]).unwrap();
        assert_eq!(q.scores, vec![2.0, 0.5]);
        assert_eq!(q.reconstructing, Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]));
        assert_eq!(q.reducing.matmul(&q.reconstructing), Matrix::identity(2));
    }

    #[test]
    fn truncation_examples() {
        let p = balancing_projection_evd(&Matrix::from_diag(&[4.0, 1.0])).unwrap();
        let (r, s) = truncate(&p, 2).unwrap();
        assert_eq!((r, s), (p.reducing.clone(), p.reconstructing.clone()));
        let (r, s) = truncate(&p, 1).unwrap();
        assert_eq!(r, Matrix::row_vector(&[1.0, 0.0]));
        assert_eq!(s, Matrix::column_vector(&[1.0, 0.0]));
        assert!(matches!(truncate(&p, 0), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(truncate(&p, 3), Err(Error::OrderOutOfRange { n: 3, max: 2 })));
    }

    #[test]
    fn biorthogonal_at_every_order() {
        let g = sym(10, 5);
        for kind in
            [ProjectionKind::EvdBalancing, ProjectionKind::DirectTruncationLeft, ProjectionKind::DirectTruncationRight]
        {
            let p = build_projection(&g, kind).unwrap();
            assert!(p.scores.windows(2).all(|w| w[0] >= w[1]));
            for n in 1..=10 {
                let (r, s) = truncate(&p, n).unwrap();
                assert!(dev_from_identity(&r.matmul(&s)) < 1e-8, "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let sys = LtiSystem::new(
            Matrix::from_diag(&[-1.0, -2.0]),
            Matrix::column_vector(&[3.0, 4.0]),
            Matrix::row_vector(&[5.0, 6.0]),
        )
        .unwrap();
        let rom = reduce_system(&sys, &Matrix::identity(2), &Matrix::identity(2)).unwrap();
        assert_eq!(rom.sys, sys);
        let rom = reduce_system(&sys, &Matrix::row_vector(&[1.0, 0.0]), &Matrix::column_vector(&[1.0, 0.0])).unwrap();
        assert_eq!(rom.sys.a(), &Matrix::from_diag(&[-1.0]));
        assert_eq!(rom.sys.b(), &Matrix::from_diag(&[3.0]));
        assert_eq!(rom.sys.c(), &Matrix::from_diag(&[5.0]));
        assert_eq!((rom.order, rom.parent_n), (1, 2));
        assert!(reduce_system(&sys, &Matrix::identity(3), &Matrix::identity(2)).is_err());
    }

    #[test]
    fn leading_blocks_equal_direct_reduction() {
        let mut rng = crate::benchmark::SeededRng::new(8);
        let a = Matrix::from_fn(6, 6, |_, _| rng.gaussian());
        let sys = LtiSystem::new(
            a,
            Matrix::from_fn(6, 2, |_, _| rng.gaussian()),
            Matrix::from_fn(2, 6, |_, _| rng.gaussian()),
        )
        .unwrap();
        let p = direct_truncation(&sym(6, 2), Side::Left).unwrap();
        let full = reduce_with(&sys, &p, 6).unwrap();
        for n in 1..=6 {
            let direct = reduce_with(&sys, &p, n).unwrap();
            let lead = full.leading(n).unwrap();
            assert!((direct.sys.a() - lead.sys.a()).max_abs() < 1e-12);
            assert!((direct.sys.b() - lead.sys.b()).max_abs() < 1e-12);
            assert!((direct.sys.c() - lead.sys.c()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn rom_roundtrip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let sys = LtiSystem::new(
            Matrix::from_diag(&[-1.0, -2.0]),
            Matrix::column_vector(&[1.0, 2.0]),
            Matrix::row_vector(&[1.0, 2.0]),
        )
        .unwrap();
        let p = balancing_projection_evd(&Matrix::from_diag(&[1.0, 3.0])).unwrap();
        let rom = reduce_with(&sys, &p, 1).unwrap();
        rom.save(dir.path()).unwrap();
        assert_eq!(Rom::load(dir.path()).unwrap(), rom);
        let side: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("rom.json")).unwrap()).unwrap();
        assert_eq!(side["kind"], "evd-balancing");
        assert_eq!(side["parent_n"], 2);
    }

    #[test]
    fn kind_names_parse() {
        for k in ProjectionKind::ALL {
            assert_eq!(k.name().parse::<ProjectionKind>().unwrap(), k);
        }
        assert!("balanced".parse::<ProjectionKind>().is_err());
    }
}
