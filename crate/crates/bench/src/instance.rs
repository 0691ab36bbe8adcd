//! Random ball-intersection problems with a known interior point.

use aamr_core::oracle::{dykstra_project, ReferenceSolution, REFERENCE_TOL};
use aamr_core::parallel::Block;
use aamr_core::{ConvexSet, Error as CoreError, MonotoneOperator, Vector};
use anyhow::{bail, Context, Result};
use rand::distributions::Uniform;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::rng::{beta_tag, stream, StreamKind};

const DYKSTRA_MAX_PASSES: usize = 2_000_000;
const MAX_ATTEMPTS: u64 = 64;

/// `N` balls `B(z + b_i, ||b_i|| + alpha_i)`, all containing `z` in their
/// interior, with the projection of `q = 0` onto their intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub instance_id: usize,
    pub z: Vector,
    pub centers: Vec<Vector>,
    pub radii: Vec<f64>,
    pub q: Vector,
    pub reference: ReferenceSolution,
    /// Geometry attempt that produced this instance (0 unless the oracle
    /// rejected earlier draws).
    pub attempt: u64,
    seed: u64,
    coord_range: [f64; 2],
}

impl ProblemInstance {
    pub fn count(&self) -> usize {
        self.centers.len()
    }

    pub fn dim(&self) -> usize {
        self.z.dim()
    }

    pub fn sets(&self) -> Vec<ConvexSet> {
        self.centers
            .iter()
            .zip(&self.radii)
            .map(|(c, &r)| ConvexSet::ball(c.clone(), r).expect("radius is positive"))
            .collect()
    }

    pub fn operators(&self) -> Vec<MonotoneOperator> {
        self.sets()
            .into_iter()
            .map(MonotoneOperator::normal_cone)
            .collect()
    }

    /// The random starting block used by both variants at this β.
    pub fn start_point(&self, beta: f64) -> Block {
        let mut rng = stream(
            self.seed,
            StreamKind::Start,
            self.count(),
            self.instance_id,
            beta_tag(beta),
        );
        let dist = Uniform::new_inclusive(self.coord_range[0], self.coord_range[1]);
        let blocks = (0..self.count())
            .map(|_| draw_vector(&mut rng, &dist, self.dim()))
            .collect();
        Block::new(blocks).expect("nonempty blocks of equal dimension")
    }
}

fn draw_vector(rng: &mut ChaCha8Rng, dist: &Uniform<f64>, dim: usize) -> Vector {
    Vector::new((0..dim).map(|_| rng.sample(dist)).collect()).expect("finite draw")
}

/// Draws the balls from the geometry stream and solves for the reference
/// projection with Dykstra's method. A rejected reference moves on to the
/// next attempt's stream.
pub fn generate_instance(
    config: &ExperimentConfig,
    count: usize,
    instance_id: usize,
) -> Result<ProblemInstance> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = stream(config.seed, StreamKind::Geometry, count, instance_id, attempt);
        let coords = Uniform::new_inclusive(config.coord_range[0], config.coord_range[1]);
        let pad = Uniform::new_inclusive(config.radius_pad[0], config.radius_pad[1]);
        let z = draw_vector(&mut rng, &coords, config.dim);
        let mut centers = Vec::with_capacity(count);
        let mut radii = Vec::with_capacity(count);
        for _ in 0..count {
            let b = draw_vector(&mut rng, &coords, config.dim);
            radii.push(b.norm() + rng.sample(pad));
            centers.push(&z + &b);
        }
        let q = Vector::zeros(config.dim)?;
        let sets: Vec<_> = centers
            .iter()
            .zip(&radii)
            .map(|(c, &r)| ConvexSet::ball(c.clone(), r))
            .collect::<Result<_, _>>()?;
        match dykstra_project(&sets, &q, REFERENCE_TOL, DYKSTRA_MAX_PASSES) {
            Ok(reference) => {
                return Ok(ProblemInstance {
                    instance_id,
                    z,
                    centers,
                    radii,
                    q,
                    reference,
                    attempt,
                    seed: config.seed,
                    coord_range: config.coord_range,
                })
            }
            Err(e @ (CoreError::OracleRejected { .. } | CoreError::MaxIterExceeded { .. })) => {
                log::warn!("instance N={count} id={instance_id} attempt {attempt}: {e}; regenerating");
            }
            Err(e) => return Err(e).context(format!("reference for N={count} id={instance_id}")),
        }
    }
    bail!("no acceptable reference for N={count} id={instance_id} after {MAX_ATTEMPTS} attempts")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dim: usize, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            dim,
            seed,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn z_is_interior_to_every_ball() {
        let config = small(10, 3);
        for id in 0..20 {
            let inst = generate_instance(&config, 6, id).unwrap();
            for (c, r) in inst.centers.iter().zip(&inst.radii) {
                let gap = r - inst.z.distance(c).unwrap();
                assert!((0.05 - 1e-12..=0.1 + 1e-12).contains(&gap), "gap {gap}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let config = small(4, 11);
        let a = generate_instance(&config, 3, 5).unwrap();
        let b = generate_instance(&config, 3, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.start_point(0.7), b.start_point(0.7));
        assert_ne!(a.start_point(0.7), a.start_point(0.72));
        assert_ne!(a, generate_instance(&config, 3, 6).unwrap());
    }

    #[test]
    fn two_balls_in_the_plane_reference_is_tight() {
        let inst = generate_instance(&small(2, 7), 2, 0).unwrap();
        assert!(inst.reference.residual < 1e-10);
        for set in inst.sets() {
            assert!(set.distance(&inst.reference.point).unwrap() < 1e-10);
        }
    }

    #[test]
    fn start_point_respects_coordinate_range() {
        let inst = generate_instance(&small(3, 1), 4, 0).unwrap();
        let x0 = inst.start_point(0.5);
        assert_eq!((x0.r(), x0.dim()), (4, 3));
        for b in x0.components() {
            assert!(b.as_slice().iter().all(|t| (-5.0..=5.0).contains(t)));
        }
    }
}
