//! Shared fixtures for the criterion benches in `benches/`.

use hartogs_core::bundle::BundleData;
use hartogs_core::geometry::{tube, Region};
use hartogs_core::nerve::{build_nerve, coboundary_matrix, Cover, IntMatrix, Resolution, ResolvedNerve};
use hartogs_core::scenarios::{l_nt, torus_core_cover};
use hartogs_core::Result;

pub struct TorusFixture {
    pub cover: Cover,
    pub nerve: ResolvedNerve,
    pub bundle: BundleData,
}

/// Torus-core cover of `G_{n/2}` with its nerve (up to `k_max`) and the clutching bundle.
pub fn torus_fixture(n: usize, k_max: usize) -> Result<TorusFixture> {
    let cover = torus_core_cover(n, n as f64 / 2.0)?;
    let nerve = build_nerve(&cover, k_max, &Resolution::analytic(0))?;
    let bundle = l_nt(&cover, &nerve)?;
    Ok(TorusFixture { cover, nerve, bundle })
}

/// `δ: C^k -> C^{k+1}` of the torus-core nerve.
pub fn coboundary_fixture(n: usize, k: usize) -> Result<IntMatrix> {
    let f = torus_fixture(n, k + 2)?;
    Ok(coboundary_matrix(&f.nerve, k))
}

/// `G_1` in `C^2`, for lattice scans.
pub fn tube_region() -> Region {
    tube(2, 1.0)
}
