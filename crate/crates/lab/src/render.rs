//! Row-tiled parallel rendering. Every pixel is a pure function of its
//! center, so the payload does not depend on the worker count.

use mcmullen_core::grid::{julia_row, FieldGrid, PayloadKind};
use mcmullen_core::trichotomy::classify_row;
use mcmullen_core::{Bounds, ClassifierConfig, Exponents, MapParams};
use rayon::prelude::*;

use crate::LabError;

/// Environment fallback for `--jobs`.
pub const JOBS_ENV: &str = "MCM_JOBS";
/// Rows handed to a worker at a time.
pub const TILE_ROWS: usize = 4;

/// Worker count from the flag, then `MCM_JOBS`, then the core count.
pub fn resolve_jobs(flag: Option<usize>) -> Result<usize, LabError> {
    let jobs = match flag {
        Some(j) => j,
        None => match std::env::var(JOBS_ENV) {
            Ok(v) => v.trim().parse().map_err(|_| LabError::Usage(format!("{JOBS_ENV}={v:?} is not a worker count")))?,
            Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
        },
    };
    if jobs == 0 {
        return Err(LabError::Usage("worker count must be at least 1".into()));
    }
    Ok(jobs)
}

/// Runs `f` on a dedicated pool of `jobs` threads.
pub fn with_workers<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, LabError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    Ok(pool.install(f))
}

fn fill_rows(grid: &mut FieldGrid, jobs: usize, row: impl Fn(usize, &mut [i32]) + Sync) -> Result<(), LabError> {
    let w = grid.width();
    let data = grid.data_mut();
    with_workers(jobs, || {
        data.par_chunks_mut(w * TILE_ROWS).enumerate().for_each(|(t, tile)| {
            for (k, r) in tile.chunks_mut(w).enumerate() {
                row(t * TILE_ROWS + k, r);
            }
        })
    })
}

/// Escape depths of the dynamical plane; `-1` where the orbit stays bounded
/// for `max_iter` steps.
pub fn render_julia(
    map: &MapParams,
    bounds: Bounds,
    width: usize,
    height: usize,
    max_iter: usize,
    jobs: usize,
) -> Result<FieldGrid, LabError> {
    let mut g = FieldGrid::zeroed(width, height, bounds, PayloadKind::EscapeDepth)?;
    fill_rows(&mut g, jobs, |j, out| julia_row(map, &bounds, width, height, j, max_iter, out))?;
    Ok(g)
}

/// Verdict codes over a rectangle of the parameter plane.
pub fn render_param(
    exp: Exponents,
    bounds: Bounds,
    width: usize,
    height: usize,
    cfg: &ClassifierConfig,
    jobs: usize,
) -> Result<FieldGrid, LabError> {
    cfg.validate()?;
    let mut g = FieldGrid::zeroed(width, height, bounds, PayloadKind::VerdictCode)?;
    fill_rows(&mut g, jobs, |j, out| classify_row(exp, &bounds, width, height, j, cfg, out))?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcmullen_core::grid::GridError;
    use mcmullen_core::trichotomy::{classify_grid, CODE_UNDEFINED};
    use mcmullen_core::{Complex64, VerdictClass};

    fn cubic() -> Exponents {
        Exponents::symmetric(3).unwrap()
    }

    #[test]
    fn matches_serial_render() {
        let map = MapParams::new(Complex64::new(0.1, 0.1), cubic()).unwrap();
        let b = Bounds::centered(Complex64::new(0.0, 0.0), 1.5).unwrap();
        let serial = mcmullen_core::grid::render_julia(&map, b, 37, 23, 200).unwrap();
        for jobs in [1, 3] {
            assert_eq!(render_julia(&map, b, 37, 23, 200, jobs).unwrap(), serial);
        }
        let cfg = ClassifierConfig::default().with_max_iter(500);
        let b = Bounds::centered(Complex64::new(0.0, 0.0), 0.1).unwrap();
        assert_eq!(render_param(cubic(), b, 9, 7, &cfg, 2).unwrap(), classify_grid(cubic(), b, 9, 7, &cfg).unwrap());
    }

    #[test]
    fn origin_pixel_is_undefined() {
        // Neighbours of the center sit at |lambda| = 0.002.
        let b = Bounds::centered(Complex64::new(0.0, 0.0), 0.003).unwrap();
        let g = render_param(cubic(), b, 3, 3, &ClassifierConfig::default(), 1).unwrap();
        assert_eq!(g.get(1, 1), CODE_UNDEFINED);
        for (i, j) in [(0, 1), (2, 1), (1, 0), (1, 2), (0, 0)] {
            assert_eq!(g.get(i, j), VerdictClass::CantorCircles.code());
        }
    }

    #[test]
    fn oversized_grid_fails_before_allocation() {
        let map = MapParams::new(Complex64::new(0.1, 0.0), cubic()).unwrap();
        let b = Bounds::centered(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let err = render_julia(&map, b, 1 << 20, 1 << 20, 10, 1).unwrap_err();
        assert!(matches!(err, LabError::Grid(GridError::TooLarge { .. })));
    }

    #[test]
    fn zero_jobs_rejected() {
        assert!(resolve_jobs(Some(0)).is_err());
        assert_eq!(resolve_jobs(Some(3)).unwrap(), 3);
    }
}
