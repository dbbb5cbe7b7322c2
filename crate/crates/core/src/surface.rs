//! Discrete graph surfaces `F(x, y) = (x, y, f(x, y), g(x, y))` on a uniform grid.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{GeomError, Result};
use crate::jet::{FirstJet, SecondJet};

/// Minimum number of nodes per axis.
pub const MIN_AXIS: usize = 8;

/// Stencil reach of first jets (centered differences).
pub const FIRST_JET_REACH: usize = 1;
/// Stencil reach of second jets (composed centered differences).
pub const SECOND_JET_REACH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainMode {
    /// Fields are periodic with period `(nx·hx, ny·hy)`.
    PeriodicTorus,
    /// Fields live on a rectangle; stencils are evaluated only where they fit.
    OpenPatch,
}

impl fmt::Display for DomainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainMode::PeriodicTorus => write!(f, "PeriodicTorus"),
            DomainMode::OpenPatch => write!(f, "OpenPatch"),
        }
    }
}

impl FromStr for DomainMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "PeriodicTorus" | "torus" | "periodic" => Ok(DomainMode::PeriodicTorus),
            "OpenPatch" | "patch" | "open" => Ok(DomainMode::OpenPatch),
            other => Err(format!("unknown domain mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub i: usize,
    pub j: usize,
}

impl Node {
    pub const fn new(i: usize, j: usize) -> Self {
        Node { i, j }
    }
}

/// Height fields `f, g` sampled at `x = i·hx`, `y = j·hy`, stored row-major
/// (`index = j·nx + i`).
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSurface {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    mode: DomainMode,
    f: Vec<f64>,
    g: Vec<f64>,
}

impl GraphSurface {
    pub fn new(
        nx: usize,
        ny: usize,
        hx: f64,
        hy: f64,
        mode: DomainMode,
        f: Vec<f64>,
        g: Vec<f64>,
    ) -> Result<Self> {
        if nx < MIN_AXIS || ny < MIN_AXIS || nx * ny < 64 {
            return Err(GeomError::InvalidGrid(format!(
                "grid {nx}x{ny} is smaller than {MIN_AXIS}x{MIN_AXIS}"
            )));
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(GeomError::InvalidGrid(format!(
                "spacings must be positive, got hx={hx}, hy={hy}"
            )));
        }
        if f.len() != nx * ny || g.len() != nx * ny {
            return Err(GeomError::InvalidGrid(format!(
                "expected {} samples per field, got f={} g={}",
                nx * ny,
                f.len(),
                g.len()
            )));
        }
        if f.iter().chain(g.iter()).any(|v| !v.is_finite()) {
            return Err(GeomError::InvalidGrid("non-finite field value".into()));
        }
        Ok(GraphSurface {
            nx,
            ny,
            hx,
            hy,
            mode,
            f,
            g,
        })
    }

    /// Samples `(f, g) = field(x, y)` at every node.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        hx: f64,
        hy: f64,
        mode: DomainMode,
        field: impl Fn(f64, f64) -> (f64, f64),
    ) -> Result<Self> {
        let mut f = Vec::with_capacity(nx * ny);
        let mut g = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (fv, gv) = field(i as f64 * hx, j as f64 * hy);
                f.push(fv);
                g.push(gv);
            }
        }
        Self::new(nx, ny, hx, hy, mode, f, g)
    }

    /// Square torus `[0, 2π)²` with `n` nodes per axis.
    pub fn torus_from_fn(n: usize, field: impl Fn(f64, f64) -> (f64, f64)) -> Result<Self> {
        let h = std::f64::consts::TAU / n as f64;
        Self::from_fn(n, n, h, h, DomainMode::PeriodicTorus, field)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn mode(&self) -> DomainMode {
        self.mode
    }
    pub fn f(&self) -> &[f64] {
        &self.f
    }
    pub fn g(&self) -> &[f64] {
        &self.g
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, node: Node) -> usize {
        node.j * self.nx + node.i
    }

    pub fn node_of(&self, index: usize) -> Node {
        Node::new(index % self.nx, index / self.nx)
    }

    pub fn coords(&self, node: Node) -> (f64, f64) {
        (node.i as f64 * self.hx, node.j as f64 * self.hy)
    }

    /// A surface with the same grid and new height fields.
    pub fn with_fields(&self, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        Self::new(self.nx, self.ny, self.hx, self.hy, self.mode, f, g)
    }

    /// Distance of the node to the boundary along the grid (`usize::MAX` on the torus).
    pub fn boundary_distance(&self, node: Node) -> usize {
        match self.mode {
            DomainMode::PeriodicTorus => usize::MAX,
            DomainMode::OpenPatch => node
                .i
                .min(node.j)
                .min(self.nx - 1 - node.i)
                .min(self.ny - 1 - node.j),
        }
    }

    /// Fails with `OutOfDomain` unless a stencil of the given reach fits at `node`.
    pub fn check_reach(&self, node: Node, reach: usize) -> Result<()> {
        if node.i >= self.nx || node.j >= self.ny || self.boundary_distance(node) < reach {
            return Err(GeomError::OutOfDomain {
                i: node.i,
                j: node.j,
                reach,
            });
        }
        Ok(())
    }

    /// Nodes where a stencil of the given reach fits, in storage order.
    pub fn nodes_with_reach(&self, reach: usize) -> impl Iterator<Item = Node> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| Node::new(i, j)))
            .filter(move |n| self.boundary_distance(*n) >= reach)
    }

    /// Storage index of `node + (di, dj)`, wrapping on the torus. The caller
    /// guarantees the offset stays inside an open patch.
    pub fn offset_index(&self, node: Node, di: isize, dj: isize) -> usize {
        let (i, j) = match self.mode {
            DomainMode::PeriodicTorus => (
                (node.i as isize + di).rem_euclid(self.nx as isize) as usize,
                (node.j as isize + dj).rem_euclid(self.ny as isize) as usize,
            ),
            DomainMode::OpenPatch => (
                (node.i as isize + di) as usize,
                (node.j as isize + dj) as usize,
            ),
        };
        j * self.nx + i
    }

    /// A stencil accessor over any scalar field sampled on this grid.
    pub fn stencil<'a>(&'a self, field: &'a [f64]) -> Stencil<'a> {
        Stencil {
            surface: self,
            field,
        }
    }

    /// Centered-difference first jet at `node`.
    pub fn first_jet(&self, node: Node) -> Result<FirstJet> {
        self.check_reach(node, FIRST_JET_REACH)?;
        let sf = self.stencil(&self.f);
        let sg = self.stencil(&self.g);
        Ok(FirstJet::new(
            sf.dx(node),
            sf.dy(node),
            sg.dx(node),
            sg.dy(node),
        ))
    }

    /// Second jet at `node`: second derivatives are compositions of the
    /// centered first differences, so every discrete derivative commutes and
    /// sums by parts on the torus.
    pub fn second_jet(&self, node: Node) -> Result<SecondJet> {
        self.check_reach(node, SECOND_JET_REACH)?;
        let sf = self.stencil(&self.f);
        let sg = self.stencil(&self.g);
        Ok(SecondJet {
            first: FirstJet::new(sf.dx(node), sf.dy(node), sg.dx(node), sg.dy(node)),
            fxx: sf.dxx(node),
            fxy: sf.dxy(node),
            fyy: sf.dyy(node),
            gxx: sg.dxx(node),
            gxy: sg.dxy(node),
            gyy: sg.dyy(node),
        })
    }

    /// Writes the plain-text grid format:
    /// header `KAF1 nx ny hx hy mode`, then one `i j f g` line per node in storage order.
    pub fn write_grid<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "KAF1 {} {} {} {} {}",
            self.nx, self.ny, self.hx, self.hy, self.mode
        )?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                writeln!(out, "{} {} {} {}", i, j, self.f[k], self.g[k])?;
            }
        }
        Ok(())
    }

    pub fn read_grid<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let io_err = |line: usize, e: std::io::Error| GeomError::GridFormat {
            line,
            msg: e.to_string(),
        };
        let (_, header) = lines.next().ok_or(GeomError::GridFormat {
            line: 1,
            msg: "empty input".into(),
        })?;
        let header = header.map_err(|e| io_err(1, e))?;
        let bad_header = |msg: &str| GeomError::GridFormat {
            line: 1,
            msg: format!("{msg}: '{header}'"),
        };
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() != 6 || tok[0] != "KAF1" {
            return Err(bad_header("expected 'KAF1 nx ny hx hy mode'"));
        }
        let nx: usize = tok[1].parse().map_err(|_| bad_header("bad nx"))?;
        let ny: usize = tok[2].parse().map_err(|_| bad_header("bad ny"))?;
        let hx: f64 = tok[3].parse().map_err(|_| bad_header("bad hx"))?;
        let hy: f64 = tok[4].parse().map_err(|_| bad_header("bad hy"))?;
        let mode: DomainMode = tok[5].parse().map_err(|e: String| bad_header(&e))?;
        if nx == 0 || ny == 0 {
            return Err(bad_header("empty grid"));
        }

        let n = nx * ny;
        let mut f = vec![0.0; n];
        let mut g = vec![0.0; n];
        let mut count = 0;
        for (lineno, line) in lines {
            let lineno = lineno + 1;
            let line = line.map_err(|e| io_err(lineno, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: &str| GeomError::GridFormat {
                line: lineno,
                msg: msg.to_string(),
            };
            if count >= n {
                return Err(bad("more node lines than nx*ny"));
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 4 {
                return Err(bad("expected 'i j f g'"));
            }
            let i: usize = t[0].parse().map_err(|_| bad("bad i"))?;
            let j: usize = t[1].parse().map_err(|_| bad("bad j"))?;
            if i != count % nx || j != count / nx {
                return Err(bad("node lines must be in row-major order"));
            }
            f[count] = t[2].parse().map_err(|_| bad("bad f"))?;
            g[count] = t[3].parse().map_err(|_| bad("bad g"))?;
            count += 1;
        }
        if count != n {
            return Err(GeomError::GridFormat {
                line: count + 1,
                msg: format!("expected {n} node lines, found {count}"),
            });
        }
        Self::new(nx, ny, hx, hy, mode, f, g)
    }
}

/// Finite-difference stencils for a scalar field on a [`GraphSurface`] grid.
#[derive(Clone, Copy)]
pub struct Stencil<'a> {
    surface: &'a GraphSurface,
    field: &'a [f64],
}

impl Stencil<'_> {
    #[inline]
    pub fn at(&self, node: Node, di: isize, dj: isize) -> f64 {
        self.field[self.surface.offset_index(node, di, dj)]
    }

    #[inline]
    pub fn dx(&self, n: Node) -> f64 {
        (self.at(n, 1, 0) - self.at(n, -1, 0)) / (2.0 * self.surface.hx)
    }

    #[inline]
    pub fn dy(&self, n: Node) -> f64 {
        (self.at(n, 0, 1) - self.at(n, 0, -1)) / (2.0 * self.surface.hy)
    }

    /// `Dx∘Dx` with the centered first difference `Dx`.
    #[inline]
    pub fn dxx(&self, n: Node) -> f64 {
        let h = self.surface.hx;
        (self.at(n, 2, 0) - 2.0 * self.at(n, 0, 0) + self.at(n, -2, 0)) / (4.0 * h * h)
    }

    #[inline]
    pub fn dyy(&self, n: Node) -> f64 {
        let h = self.surface.hy;
        (self.at(n, 0, 2) - 2.0 * self.at(n, 0, 0) + self.at(n, 0, -2)) / (4.0 * h * h)
    }

    #[inline]
    pub fn dxy(&self, n: Node) -> f64 {
        (self.at(n, 1, 1) - self.at(n, 1, -1) - self.at(n, -1, 1) + self.at(n, -1, -1))
            / (4.0 * self.surface.hx * self.surface.hy)
    }

    /// Three-point `(u₊ − 2u + u₋)/h²` along x.
    #[inline]
    pub fn dxx_compact(&self, n: Node) -> f64 {
        let h = self.surface.hx;
        (self.at(n, 1, 0) - 2.0 * self.at(n, 0, 0) + self.at(n, -1, 0)) / (h * h)
    }

    #[inline]
    pub fn dyy_compact(&self, n: Node) -> f64 {
        let h = self.surface.hy;
        (self.at(n, 0, 1) - 2.0 * self.at(n, 0, 0) + self.at(n, 0, -1)) / (h * h)
    }
}
