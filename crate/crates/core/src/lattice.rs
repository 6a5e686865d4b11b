//! Non-intersecting lattice random-walk bridges above a floor, and the
//! heat-bath style flip dynamics that samples them.
//!
//! Heights are stored as integers in units of `1/n`; time steps are `1/n^2`.
//! A flip at `(s, i, ±)` moves line `i` at interior time `s` by `±2/n` and is
//! kept only when the system stays a valid ordered walk system. Driving two
//! systems with the same flip stream preserves pointwise order between them.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::boundary::BoundaryData;
use crate::error::{invalid, Error, Result};

const NO_FLOOR: i64 = i64::MIN / 4;

/// Boundary data rounded onto the `1/n` lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBoundary {
    pub n: u32,
    pub steps: usize,
    pub entrance: Vec<i64>,
    pub exit: Vec<i64>,
    /// Smallest height the bottom line may take at each lattice time.
    pub floor_min: Vec<i64>,
    a_bits: u64,
    b_bits: u64,
}

impl LatticeBoundary {
    pub fn from_boundary(boundary: &BoundaryData, n: u32) -> Result<Self> {
        boundary.validate()?;
        if n == 0 {
            return invalid("lattice refinement n must be positive");
        }
        let nf = n as f64;
        let raw_steps = (boundary.b - boundary.a) * nf * nf;
        let steps = raw_steps.round();
        if (raw_steps - steps).abs() > 1e-6 || steps < 1.0 {
            return invalid(format!(
                "interval length {} is not a positive multiple of the time step 1/n^2 = {}",
                boundary.b - boundary.a,
                1.0 / (nf * nf)
            ));
        }
        let steps = steps as usize;
        let to_lattice = |v: f64, what: &str| -> i64 {
            let scaled = v * nf;
            let down = (scaled + 1e-9).floor();
            if (scaled - down).abs() > 1e-9 {
                log::warn!("{what} {v} is off the 1/{n} lattice; rounded down to {}", down / nf);
            }
            down as i64
        };
        let entrance: Vec<i64> = boundary
            .entrance
            .iter()
            .map(|&x| to_lattice(x, "entrance value"))
            .collect();
        let exit: Vec<i64> = boundary
            .exit
            .iter()
            .zip(&entrance)
            .map(|(&y, &x)| {
                let mut y = to_lattice(y, "exit value");
                if (y - x - steps as i64).rem_euclid(2) != 0 {
                    log::warn!(
                        "exit value {} has the wrong walk parity; lowered by 1/{n}",
                        y as f64 / nf
                    );
                    y -= 1;
                }
                y
            })
            .collect();
        for (name, xs) in [("entrance", &entrance), ("exit", &exit)] {
            if let Some(i) = xs.windows(2).position(|w| w[0] <= w[1]) {
                return Err(Error::Infeasible(format!(
                    "{name} values of curves {i} and {} coincide after rounding to the 1/{n} lattice",
                    i + 1
                )));
            }
        }
        let floor_min = (0..=steps)
            .map(|j| {
                let t = boundary.a + j as f64 / (nf * nf);
                match &boundary.floor {
                    None => NO_FLOOR,
                    Some(f) => (f.eval(t) * nf + 1e-9).floor() as i64 + 1,
                }
            })
            .collect();
        Ok(Self {
            n,
            steps,
            entrance,
            exit,
            floor_min,
            a_bits: boundary.a.to_bits(),
            b_bits: boundary.b.to_bits(),
        })
    }

    pub fn a(&self) -> f64 {
        f64::from_bits(self.a_bits)
    }

    pub fn b(&self) -> f64 {
        f64::from_bits(self.b_bits)
    }

    pub fn k(&self) -> usize {
        self.entrance.len()
    }

    pub fn has_floor(&self) -> bool {
        self.floor_min.first().is_some_and(|&f| f != NO_FLOOR)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flip {
    Up,
    Down,
}

/// One clock ring: try to move line `line` at interior time index `time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlipEvent {
    pub time: usize,
    pub line: usize,
    pub flip: Flip,
}

impl FlipEvent {
    pub fn random<R: Rng + ?Sized>(steps: usize, k: usize, rng: &mut R) -> Self {
        let time = rng.random_range(1..steps);
        let line = rng.random_range(0..k);
        let flip = if rng.random::<bool>() { Flip::Up } else { Flip::Down };
        Self { time, line, flip }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBridgeSystem {
    boundary: LatticeBoundary,
    /// `heights[i][s]`, line 0 on top.
    heights: Vec<Vec<i64>>,
}

impl LatticeBridgeSystem {
    pub fn from_heights(boundary: LatticeBoundary, heights: Vec<Vec<i64>>) -> Result<Self> {
        let sys = Self { boundary, heights };
        sys.validate()?;
        Ok(sys)
    }

    /// The pointwise-lowest admissible configuration.
    pub fn lowest(boundary: LatticeBoundary) -> Result<Self> {
        let k = boundary.k();
        let len = boundary.steps + 1;
        let mut heights = vec![Vec::new(); k];
        for i in (0..k).rev() {
            let barrier: Vec<i64> = if i + 1 < k {
                heights[i + 1].iter().map(|h| h + 1).collect()
            } else {
                boundary.floor_min.clone()
            };
            let (x, y) = (boundary.entrance[i], boundary.exit[i]);
            let mut req = barrier;
            req[0] = req[0].max(x);
            req[len - 1] = req[len - 1].max(y);
            for (j, r) in req.iter_mut().enumerate() {
                if (*r - x - j as i64).rem_euclid(2) != 0 {
                    *r += 1;
                }
            }
            for j in 1..len {
                req[j] = req[j].max(req[j - 1] - 1);
            }
            for j in (0..len - 1).rev() {
                req[j] = req[j].max(req[j + 1] - 1);
            }
            let what = if i + 1 < k {
                format!("curve {}", i + 1)
            } else {
                "the floor".into()
            };
            if req[0] != x {
                return Err(Error::Infeasible(format!(
                    "curve {i} cannot start at {} and stay above {what} (needs at least {})",
                    x as f64 / boundary.n as f64,
                    req[0] as f64 / boundary.n as f64
                )));
            }
            if req[len - 1] != y {
                return Err(Error::Infeasible(format!(
                    "curve {i} cannot end at {} and stay above {what} (needs at least {})",
                    y as f64 / boundary.n as f64,
                    req[len - 1] as f64 / boundary.n as f64
                )));
            }
            heights[i] = req;
        }
        Ok(Self { boundary, heights })
    }

    /// Independent uniform walk bridges, redrawn until admissible. This is
    /// an exact draw from the conditioned law; `None` if every attempt failed.
    pub fn rejection_sample<R: Rng + ?Sized>(boundary: &LatticeBoundary, attempts: usize, rng: &mut R) -> Option<Self> {
        for _ in 0..attempts {
            let heights: Vec<Vec<i64>> = (0..boundary.k())
                .map(|i| random_walk_bridge(boundary.entrance[i], boundary.exit[i], boundary.steps, rng))
                .collect::<Option<_>>()?;
            let sys = Self {
                boundary: boundary.clone(),
                heights,
            };
            if sys.is_admissible() {
                return Some(sys);
            }
        }
        None
    }

    pub fn boundary(&self) -> &LatticeBoundary {
        &self.boundary
    }

    pub fn n(&self) -> u32 {
        self.boundary.n
    }

    pub fn k(&self) -> usize {
        self.heights.len()
    }

    pub fn steps(&self) -> usize {
        self.boundary.steps
    }

    /// Integer heights in units of `1/n`.
    pub fn heights(&self) -> &[Vec<i64>] {
        &self.heights
    }

    pub fn time(&self, s: usize) -> f64 {
        let nf = self.boundary.n as f64;
        self.boundary.a() + s as f64 / (nf * nf)
    }

    pub fn value(&self, line: usize, s: usize) -> f64 {
        self.heights[line][s] as f64 / self.boundary.n as f64
    }

    /// Applies one flip; returns whether it was accepted.
    pub fn glauber_step(&mut self, ev: FlipEvent) -> bool {
        let (s, i) = (ev.time, ev.line);
        if s == 0 || s >= self.boundary.steps || i >= self.heights.len() {
            return false;
        }
        let line = &self.heights[i];
        let h = line[s];
        let new = match ev.flip {
            Flip::Up => h + 2,
            Flip::Down => h - 2,
        };
        let mid = (h + new) / 2;
        if line[s - 1] != mid || line[s + 1] != mid {
            return false;
        }
        match ev.flip {
            Flip::Up => {
                if i > 0 && new >= self.heights[i - 1][s] {
                    return false;
                }
            }
            Flip::Down => {
                let below = if i + 1 < self.heights.len() {
                    self.heights[i + 1][s] + 1
                } else {
                    self.boundary.floor_min[s]
                };
                if new < below {
                    return false;
                }
            }
        }
        self.heights[i][s] = new;
        true
    }

    pub fn updates_per_sweep(&self) -> usize {
        self.boundary.steps.saturating_sub(1) * self.k() * 2
    }

    /// Runs `sweeps` sweeps of uniformly chosen flips.
    pub fn run_chain<R: Rng + ?Sized>(&mut self, sweeps: usize, rng: &mut R) {
        if self.boundary.steps < 2 {
            return;
        }
        let updates = sweeps * self.updates_per_sweep();
        let (steps, k) = (self.boundary.steps, self.k());
        for _ in 0..updates {
            self.glauber_step(FlipEvent::random(steps, k, rng));
        }
    }

    fn is_admissible(&self) -> bool {
        self.validate().is_ok()
    }

    /// Full invariant check: walk steps, endpoints, strict ordering, floor.
    pub fn validate(&self) -> Result<()> {
        let b = &self.boundary;
        if self.heights.len() != b.k() {
            return invalid("height array has the wrong number of lines");
        }
        for (i, line) in self.heights.iter().enumerate() {
            if line.len() != b.steps + 1 {
                return invalid(format!("line {i} has the wrong length"));
            }
            if line[0] != b.entrance[i] || line[b.steps] != b.exit[i] {
                return invalid(format!("line {i} does not match its boundary values"));
            }
            if let Some(s) = line.windows(2).position(|w| (w[0] - w[1]).abs() != 1) {
                return invalid(format!("line {i} is not a walk at step {s}"));
            }
        }
        for s in 0..=b.steps {
            for i in 0..self.heights.len() {
                let h = self.heights[i][s];
                if i + 1 < self.heights.len() && h <= self.heights[i + 1][s] {
                    return invalid(format!("lines {i} and {} touch at step {s}", i + 1));
                }
                if i + 1 == self.heights.len() && h < b.floor_min[s] {
                    return invalid(format!("bottom line meets the floor at step {s}"));
                }
            }
        }
        Ok(())
    }

    /// True when every line lies weakly below the matching line of `other`.
    pub fn dominated_by(&self, other: &LatticeBridgeSystem) -> bool {
        self.heights
            .iter()
            .zip(&other.heights)
            .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x <= y))
    }
}

/// Uniform random walk bridge with `steps` steps of `±1` from `x` to `y`.
pub fn random_walk_bridge<R: Rng + ?Sized>(x: i64, y: i64, steps: usize, rng: &mut R) -> Option<Vec<i64>> {
    let diff = y - x;
    let l = steps as i64;
    if diff.abs() > l || (l + diff).rem_euclid(2) != 0 {
        return None;
    }
    let ups = ((l + diff) / 2) as usize;
    let mut incs: Vec<i64> = (0..steps).map(|j| if j < ups { 1 } else { -1 }).collect();
    incs.shuffle(rng);
    let mut path = Vec::with_capacity(steps + 1);
    let mut h = x;
    path.push(h);
    for d in incs {
        h += d;
        path.push(h);
    }
    Some(path)
}

pub fn lowest_initial_configuration(boundary: &BoundaryData, n: u32) -> Result<LatticeBridgeSystem> {
    LatticeBridgeSystem::lowest(LatticeBoundary::from_boundary(boundary, n)?)
}

/// Two systems driven by one shared flip stream.
#[derive(Debug, Clone)]
pub struct CoupledChains {
    pub lower: LatticeBridgeSystem,
    pub upper: LatticeBridgeSystem,
}

impl CoupledChains {
    /// Starts both chains from their lowest configurations. Requires the
    /// `lower` floor to sit weakly below the `upper` floor, boundary values of
    /// `upper` to dominate those of `lower` line by line, and each line's
    /// values to agree in parity (otherwise the shared flips cannot preserve
    /// order).
    pub fn new(lower: &BoundaryData, upper: &BoundaryData, n: u32) -> Result<Self> {
        let lf = LatticeBoundary::from_boundary(lower, n)?;
        let ug = LatticeBoundary::from_boundary(upper, n)?;
        if lf.steps != ug.steps || lf.a() != ug.a() || lf.k() != ug.k() {
            return invalid("coupled boundaries must share interval and line count");
        }
        if lf.floor_min.iter().zip(&ug.floor_min).any(|(f, g)| f > g) {
            return invalid("lower floor exceeds upper floor somewhere");
        }
        for i in 0..lf.k() {
            for (name, f, g) in [
                ("entrance", lf.entrance[i], ug.entrance[i]),
                ("exit", lf.exit[i], ug.exit[i]),
            ] {
                if g < f {
                    return invalid(format!("{name} of line {i} is not dominated"));
                }
                if (g - f) % 2 != 0 {
                    return invalid(format!("{name} of line {i} differs by an odd number of lattice units"));
                }
            }
        }
        let lower = LatticeBridgeSystem::lowest(lf)?;
        let upper = LatticeBridgeSystem::lowest(ug)?;
        debug_assert!(lower.dominated_by(&upper));
        Ok(Self { lower, upper })
    }

    pub fn step(&mut self, ev: FlipEvent) {
        self.lower.glauber_step(ev);
        self.upper.glauber_step(ev);
    }

    /// Runs `sweeps` sweeps; `after_sweep` sees both chains after each one.
    pub fn run<R: Rng + ?Sized>(
        &mut self,
        sweeps: usize,
        rng: &mut R,
        mut after_sweep: impl FnMut(usize, &LatticeBridgeSystem, &LatticeBridgeSystem),
    ) {
        let (steps, k) = (self.lower.steps(), self.lower.k());
        if steps < 2 {
            return;
        }
        let per = self.lower.updates_per_sweep();
        for sweep in 0..sweeps {
            for _ in 0..per {
                self.step(FlipEvent::random(steps, k, rng));
            }
            after_sweep(sweep, &self.lower, &self.upper);
        }
    }
}

pub fn run_coupled_chains<R: Rng + ?Sized>(
    boundary_f: &BoundaryData,
    boundary_g: &BoundaryData,
    n: u32,
    sweeps: usize,
    rng: &mut R,
) -> Result<(LatticeBridgeSystem, LatticeBridgeSystem)> {
    let mut chains = CoupledChains::new(boundary_f, boundary_g, n)?;
    chains.run(sweeps, rng, |_, _, _| {});
    Ok((chains.lower, chains.upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::GridPath;
    use crate::rng::RngSeed;

    fn bd(a: f64, b: f64, x: &[f64], y: &[f64], floor: Option<f64>) -> BoundaryData {
        let floor = floor.map(|c| GridPath::constant(a, b, 1, c).unwrap());
        BoundaryData::new(a, b, x.to_vec(), y.to_vec(), floor).unwrap()
    }

    #[test]
    fn single_v_shaped_minimum() {
        // n = 4: two lattice steps span 1/8 in time.
        let sys = lowest_initial_configuration(&bd(0.0, 0.125, &[0.0], &[0.0], None), 4).unwrap();
        assert_eq!(sys.heights(), &[vec![0, -1, 0]]);
        assert_eq!(sys.value(0, 1), -0.25);
    }

    #[test]
    fn lowest_admits_no_down_flip() {
        let boundary = bd(0.0, 3.0, &[2.0, 0.0, -1.0], &[1.0, -1.0, -2.0], Some(-4.0));
        let mut sys = lowest_initial_configuration(&boundary, 2).unwrap();
        sys.validate().unwrap();
        for s in 1..sys.steps() {
            for i in 0..sys.k() {
                let before = sys.clone();
                assert!(!sys.glauber_step(FlipEvent {
                    time: s,
                    line: i,
                    flip: Flip::Down
                }));
                assert_eq!(sys, before);
            }
        }
    }

    #[test]
    fn floor_above_entrance_is_infeasible() {
        let floor = Some(GridPath::constant(0.0, 1.0, 1, 1.0).unwrap());
        let b = BoundaryData {
            a: 0.0,
            b: 1.0,
            entrance: vec![0.0],
            exit: vec![0.0],
            floor,
        };
        assert!(matches!(lowest_initial_configuration(&b, 2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn bump_in_floor_is_infeasible() {
        // Floor spike in the middle higher than the walk can reach.
        let floor = GridPath::new(0.0, 1.0, vec![-1.0, 5.0, -1.0]).unwrap();
        let b = BoundaryData::new(0.0, 1.0, vec![0.0], vec![0.0], Some(floor)).unwrap();
        let err = lowest_initial_configuration(&b, 2).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }

    #[test]
    fn off_lattice_time_is_rejected() {
        assert!(matches!(
            lowest_initial_configuration(&bd(0.0, 0.3, &[0.0], &[0.0], None), 2),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn flip_breaking_walk_is_rejected() {
        let mut sys = LatticeBridgeSystem::from_heights(
            LatticeBoundary::from_boundary(&bd(0.0, 4.0, &[0.0], &[0.0], None), 1).unwrap(),
            vec![vec![0, 1, 2, 1, 0]],
        )
        .unwrap();
        // Up at s=1 would need both neighbours at 2.
        assert!(!sys.glauber_step(FlipEvent {
            time: 1,
            line: 0,
            flip: Flip::Up
        }));
        // Peak at s=2 can go down.
        assert!(sys.glauber_step(FlipEvent {
            time: 2,
            line: 0,
            flip: Flip::Down
        }));
        assert_eq!(sys.heights()[0], vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn dip_flips_up() {
        let mut sys = lowest_initial_configuration(&bd(0.0, 4.0, &[0.0], &[0.0], None), 1).unwrap();
        assert_eq!(sys.heights()[0], vec![0, -1, -2, -1, 0]);
        assert!(sys.glauber_step(FlipEvent {
            time: 2,
            line: 0,
            flip: Flip::Up
        }));
        assert_eq!(sys.value(0, 2), 0.0);
    }

    #[test]
    fn random_events_preserve_validity() {
        let boundary = bd(0.0, 4.0, &[1.0, 0.0, -2.0], &[1.0, -2.0, -4.0], Some(-5.0));
        let mut sys = lowest_initial_configuration(&boundary, 1).unwrap();
        let mut rng = RngSeed::new(1, 1).rng();
        let (steps, k) = (sys.steps(), sys.k());
        for _ in 0..100_000 {
            let ev = FlipEvent::random(steps, k, &mut rng);
            let before = sys.clone();
            let accepted = sys.glauber_step(ev);
            sys.validate().unwrap();
            assert_eq!(accepted, sys != before);
        }
    }

    #[test]
    fn zero_sweeps_is_identity() {
        let mut sys = lowest_initial_configuration(&bd(0.0, 2.0, &[0.0], &[0.0], None), 2).unwrap();
        let before = sys.clone();
        sys.run_chain(0, &mut RngSeed::new(1, 0).rng());
        assert_eq!(sys, before);
    }

    #[test]
    fn identical_coupled_systems_stay_identical() {
        let b = bd(0.0, 2.0, &[1.0, 0.0], &[0.0, -1.0], Some(-3.0));
        let (f, g) = run_coupled_chains(&b, &b, 2, 50, &mut RngSeed::new(3, 0).rng()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn coupling_rejects_bad_inputs() {
        let f = bd(0.0, 2.0, &[1.0, 0.0], &[0.0, -1.0], None);
        let g_low = bd(0.0, 2.0, &[1.0, -1.0], &[0.0, -1.0], None);
        assert!(CoupledChains::new(&f, &g_low, 1).is_err());
        // Odd parity gap between coupled lines.
        let g_odd = bd(0.0, 2.0, &[2.0, 0.0], &[1.0, -1.0], None);
        assert!(CoupledChains::new(&f, &g_odd, 1).is_err());
        let f_floor = bd(0.0, 2.0, &[1.0, 0.0], &[0.0, -1.0], Some(-2.0));
        let g_floor = bd(0.0, 2.0, &[1.0, 0.0], &[0.0, -1.0], Some(-3.0));
        assert!(CoupledChains::new(&f_floor, &g_floor, 1).is_err());
    }

    #[test]
    fn rejection_sample_is_admissible() {
        let b = LatticeBoundary::from_boundary(&bd(0.0, 1.0, &[0.5, 0.0], &[0.5, 0.0], Some(-2.0)), 4).unwrap();
        let sys = LatticeBridgeSystem::rejection_sample(&b, 10_000, &mut RngSeed::new(9, 0).rng()).unwrap();
        sys.validate().unwrap();
    }

    #[test]
    fn walk_bridge_endpoints() {
        let mut rng = RngSeed::new(1, 2).rng();
        let p = random_walk_bridge(3, -1, 10, &mut rng).unwrap();
        assert_eq!((p[0], p[10]), (3, -1));
        assert!(random_walk_bridge(0, 1, 10, &mut rng).is_none());
        assert!(random_walk_bridge(0, 12, 10, &mut rng).is_none());
    }
}
