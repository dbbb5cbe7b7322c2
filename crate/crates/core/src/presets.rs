//! Initial surfaces.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::surface::{DomainMode, GraphSurface};

/// Grid geometry shared by all presets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub mode: DomainMode,
}

impl GridSpec {
    /// `n × n` torus of side `2π`.
    pub fn torus(n: usize) -> Self {
        let h = TAU / n as f64;
        GridSpec { nx: n, ny: n, hx: h, hy: h, mode: DomainMode::PeriodicTorus }
    }

    pub fn patch(n: usize, h: f64) -> Self {
        GridSpec { nx: n, ny: n, hx: h, hy: h, mode: DomainMode::OpenPatch }
    }

    /// Side lengths `(nx·hx, ny·hy)`, the periods on the torus.
    pub fn extent(&self) -> (f64, f64) {
        (self.nx as f64 * self.hx, self.ny as f64 * self.hy)
    }

    pub fn sample(&self, field: impl Fn(f64, f64) -> (f64, f64)) -> Result<GraphSurface> {
        GraphSurface::from_fn(self.nx, self.ny, self.hx, self.hy, self.mode, field)
    }
}

pub const RANDOM_MAX_WAVENUMBER: i32 = 3;
pub const RANDOM_MIN_COS: f64 = 0.1;
const RANDOM_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Flat,
    /// `f = ε sin(kx x) sin(ky y)`, `g = ε_g cos(kx x) cos(ky y)`, with
    /// frequencies scaled to the grid periods.
    PerturbedTorus { eps: f64, eps_g: f64, kx: u32, ky: u32 },
    /// Affine graph `f = slope_f · x`, `g = slope_g · y`.
    ShearedPlane { slope_f: f64, slope_g: f64 },
    /// `f + ig = z^k`.
    HolomorphicPatch { power: u32 },
    /// Truncated Fourier series with random amplitudes, resampled until
    /// `min cos α ≥ 0.1`. A nonzero `carrier` adds `carrier · e^{ix}` to
    /// `f + ig`, which keeps `sin α` away from zero.
    RandomFourier { amplitude: f64, carrier: f64, seed: u64 },
    FromFile(PathBuf),
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Flat => "flat",
            Preset::PerturbedTorus { .. } => "perturbed_torus",
            Preset::ShearedPlane { .. } => "sheared_plane",
            Preset::HolomorphicPatch { .. } => "holomorphic_patch",
            Preset::RandomFourier { .. } => "random_fourier",
            Preset::FromFile(_) => "from_file",
        }
    }

    pub fn build(&self, grid: &GridSpec) -> Result<GraphSurface> {
        match self {
            Preset::Flat => grid.sample(|_, _| (0.0, 0.0)),
            Preset::PerturbedTorus { eps, eps_g, kx, ky } => {
                let (lx, ly) = grid.extent();
                let (wx, wy) = (TAU * *kx as f64 / lx, TAU * *ky as f64 / ly);
                grid.sample(|x, y| {
                    (
                        eps * (wx * x).sin() * (wy * y).sin(),
                        eps_g * (wx * x).cos() * (wy * y).cos(),
                    )
                })
            }
            Preset::ShearedPlane { slope_f, slope_g } => {
                grid.sample(|x, y| (slope_f * x, slope_g * y))
            }
            Preset::HolomorphicPatch { power } => grid.sample(|x, y| {
                let mut re = 1.0;
                let mut im = 0.0;
                for _ in 0..*power {
                    (re, im) = (re * x - im * y, re * y + im * x);
                }
                (re, im)
            }),
            Preset::RandomFourier { amplitude, carrier, seed } => {
                random_fourier(grid, *amplitude, *carrier, *seed)
            }
            Preset::FromFile(path) => {
                let file = File::open(path).map_err(|e| {
                    GeomError::InvalidGrid(format!("{}: {e}", path.display()))
                })?;
                GraphSurface::read_grid(BufReader::new(file))
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Mode {
    kx: f64,
    ky: f64,
    f_cos: f64,
    f_sin: f64,
    g_cos: f64,
    g_sin: f64,
}

fn random_modes(rng: &mut ChaCha8Rng, amplitude: f64) -> Vec<Mode> {
    let k = RANDOM_MAX_WAVENUMBER;
    let mut modes = Vec::new();
    for kx in -k..=k {
        for ky in 0..=k {
            if (ky == 0 && kx <= 0) || kx * kx + ky * ky > k * k {
                continue;
            }
            let scale = amplitude / (1.0 + (kx * kx + ky * ky) as f64);
            let mut r = || scale * rng.gen_range(-1.0..1.0);
            modes.push(Mode {
                kx: kx as f64,
                ky: ky as f64,
                f_cos: r(),
                f_sin: r(),
                g_cos: r(),
                g_sin: r(),
            });
        }
    }
    modes
}

fn random_fourier(grid: &GridSpec, amplitude: f64, carrier: f64, seed: u64) -> Result<GraphSurface> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lx, ly) = grid.extent();
    let (ux, uy) = (TAU / lx, TAU / ly);
    let mut amp = amplitude;
    loop {
        for _ in 0..RANDOM_ATTEMPTS {
            let modes = random_modes(&mut rng, amp);
            let s = grid.sample(|x, y| {
                let (mut f, mut g) = (carrier * (ux * x).cos(), carrier * (ux * x).sin());
                for m in &modes {
                    let ph = m.kx * ux * x + m.ky * uy * y;
                    let (sn, cs) = ph.sin_cos();
                    f += m.f_cos * cs + m.f_sin * sn;
                    g += m.g_cos * cs + m.g_sin * sn;
                }
                (f, g)
            })?;
            let min_cos = s
                .nodes_with_reach(1)
                .map(|n| s.first_jet(n).map(|j| j.cos_alpha))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if min_cos >= RANDOM_MIN_COS {
                return Ok(s);
            }
        }
        amp *= 0.5;
    }
}
