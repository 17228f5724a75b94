//! Combinatorial maps: graphs embedded in oriented surfaces, encoded by the
//! rotation of darts around each vertex.
//!
//! Edge `e` owns darts `2e` and `2e + 1`, one per endpoint. `theta` swaps
//! the darts of an edge; `sigma` rotates darts counterclockwise around their
//! vertex; `phi(d) = sigma(theta(d))` steps along the boundary of the face
//! on the left of `d`. Vertices are the orbits of `sigma`, faces the orbits
//! of `phi`. Re-reading `phi` as a rotation gives the dual map, and this
//! swap is an exact involution on the dart encoding.

use crate::util::DisjointSets;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EMapError {
    #[error("dart count {0} is odd")]
    OddDarts(usize),
    #[error("dart {0} appears {1} times across the rotations")]
    BadRotation(usize, usize),
    #[error("rotation names dart {0}, but only {1} darts exist")]
    DartOutOfRange(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EMap {
    sigma: Vec<usize>,
}

impl EMap {
    pub fn new(sigma: Vec<usize>) -> Result<Self, EMapError> {
        if !sigma.len().is_multiple_of(2) {
            return Err(EMapError::OddDarts(sigma.len()));
        }
        let mut seen = vec![0usize; sigma.len()];
        for &d in &sigma {
            if d >= sigma.len() {
                return Err(EMapError::DartOutOfRange(d, sigma.len()));
            }
            seen[d] += 1;
        }
        if let Some(d) = seen.iter().position(|&k| k != 1) {
            return Err(EMapError::BadRotation(d, seen[d]));
        }
        Ok(EMap { sigma })
    }

    /// Builds from one counterclockwise dart list per vertex. Every dart
    /// `0..2 * edges` must appear exactly once across the lists.
    pub fn from_vertex_rotations(edges: usize, rotations: &[Vec<usize>]) -> Result<Self, EMapError> {
        let n = edges * 2;
        let mut sigma = vec![0usize; n];
        let mut count = vec![0usize; n];
        for rot in rotations {
            for (i, &d) in rot.iter().enumerate() {
                if d >= n {
                    return Err(EMapError::DartOutOfRange(d, n));
                }
                count[d] += 1;
                sigma[d] = rot[(i + 1) % rot.len()];
            }
        }
        if let Some(d) = count.iter().position(|&k| k != 1) {
            return Err(EMapError::BadRotation(d, count[d]));
        }
        Ok(EMap { sigma })
    }

    pub fn darts(&self) -> usize {
        self.sigma.len()
    }

    pub fn edges(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn edge_of(&self, dart: usize) -> usize {
        dart / 2
    }

    pub fn theta(&self, d: usize) -> usize {
        d ^ 1
    }

    pub fn sigma(&self, d: usize) -> usize {
        self.sigma[d]
    }

    /// Next dart along the face on the left of `d`.
    pub fn phi(&self, d: usize) -> usize {
        self.sigma[d ^ 1]
    }

    pub fn vertices(&self) -> Orbits {
        Orbits::of(&self.sigma)
    }

    pub fn faces(&self) -> Orbits {
        let phi: Vec<usize> = (0..self.darts()).map(|d| self.phi(d)).collect();
        Orbits::of(&phi)
    }

    /// The dual map on the same darts: dual vertices are primal faces and
    /// dual faces are primal vertices. Applying it twice restores `self`.
    pub fn dual(&self) -> EMap {
        let phi: Vec<usize> = (0..self.darts()).map(|d| self.phi(d)).collect();
        EMap { sigma: phi }
    }

    /// Connected components as sorted dart lists, ordered by smallest dart.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut ds = DisjointSets::new(self.darts());
        for d in 0..self.darts() {
            ds.union(d, self.theta(d));
            ds.union(d, self.sigma[d]);
        }
        ds.groups()
    }

    /// Per component: its darts and the Euler characteristic of the closed
    /// surface the rotation system embeds it in.
    pub fn component_euler(&self) -> Vec<(Vec<usize>, i64)> {
        let comps = self.components();
        let mut comp_of = vec![0usize; self.darts()];
        for (i, comp) in comps.iter().enumerate() {
            for &d in comp {
                comp_of[d] = i;
            }
        }
        let mut v = vec![0i64; comps.len()];
        let mut e = vec![0i64; comps.len()];
        let mut f = vec![0i64; comps.len()];
        for orb in self.vertices().orbits() {
            v[comp_of[orb[0]]] += 1;
        }
        for d in (0..self.darts()).step_by(2) {
            e[comp_of[d]] += 1;
        }
        for orb in self.faces().orbits() {
            f[comp_of[orb[0]]] += 1;
        }
        comps
            .into_iter()
            .enumerate()
            .map(|(i, comp)| (comp, v[i] - e[i] + f[i]))
            .collect()
    }
}

/// Orbits of a dart permutation. Each orbit is listed from its smallest
/// dart in permutation order; orbits are sorted by smallest dart.
#[derive(Clone, Debug)]
pub struct Orbits {
    orbit_of: Vec<usize>,
    orbits: Vec<Vec<usize>>,
}

impl Orbits {
    fn of(perm: &[usize]) -> Orbits {
        let mut orbit_of = vec![usize::MAX; perm.len()];
        let mut orbits = Vec::new();
        for start in 0..perm.len() {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let idx = orbits.len();
            let mut orb = vec![start];
            orbit_of[start] = idx;
            let mut d = perm[start];
            while d != start {
                orbit_of[d] = idx;
                orb.push(d);
                d = perm[d];
            }
            orbits.push(orb);
        }
        Orbits { orbit_of, orbits }
    }

    pub fn orbit_of(&self, d: usize) -> usize {
        self.orbit_of[d]
    }

    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Triangle: vertices 0, 1, 2; edge e between vertices e and (e + 1) % 3,
    /// with dart 2e at vertex e.
    fn triangle() -> EMap {
        EMap::from_vertex_rotations(3, &[vec![0, 5], vec![2, 1], vec![4, 3]]).unwrap()
    }

    #[test]
    fn triangle_on_sphere() {
        let m = triangle();
        assert_eq!(m.vertices().len(), 3);
        assert_eq!(m.edges(), 3);
        assert_eq!(m.faces().len(), 2);
        let ce = m.component_euler();
        assert_eq!(ce.len(), 1);
        assert_eq!(ce[0].1, 2);
    }

    #[test]
    fn single_loop_on_sphere() {
        let m = EMap::from_vertex_rotations(1, &[vec![0, 1]]).unwrap();
        assert_eq!(m.vertices().len(), 1);
        assert_eq!(m.faces().len(), 2);
        assert_eq!(m.component_euler()[0].1, 2);
    }

    #[test]
    fn theta_graph_on_sphere() {
        // Two vertices joined by three parallel edges. Rotations reversed at
        // the second vertex embed it in the sphere with three faces.
        let m = EMap::from_vertex_rotations(3, &[vec![0, 2, 4], vec![5, 3, 1]]).unwrap();
        assert_eq!(m.vertices().len(), 2);
        assert_eq!(m.faces().len(), 3);
        assert_eq!(m.component_euler()[0].1, 2);
    }

    /// K4 with the planar rotation system: outer triangle 0, 1, 2 and centre
    /// vertex 3. Edges: 0 = (0,1), 1 = (1,2), 2 = (2,0), 3 = (0,3),
    /// 4 = (1,3), 5 = (2,3); dart 2e at the first endpoint.
    fn k4_planar() -> EMap {
        EMap::from_vertex_rotations(
            6,
            &[vec![0, 6, 5], vec![2, 8, 1], vec![4, 10, 3], vec![7, 9, 11]],
        )
        .unwrap()
    }

    #[test]
    fn k4_euler_by_rotation() {
        let planar = k4_planar();
        assert_eq!(planar.vertices().len(), 4);
        assert_eq!(planar.faces().len(), 4);
        assert_eq!(planar.component_euler()[0].1, 2);
        // Swapping one rotation produces a toroidal embedding.
        let twisted = EMap::from_vertex_rotations(
            6,
            &[vec![0, 5, 6], vec![2, 8, 1], vec![4, 10, 3], vec![7, 9, 11]],
        )
        .unwrap();
        assert_eq!(twisted.component_euler()[0].1, 0);
    }

    #[test]
    fn dual_swaps_vertices_and_faces() {
        let m = k4_planar();
        let d = m.dual();
        assert_eq!(d.vertices().len(), m.faces().len());
        assert_eq!(d.faces().len(), m.vertices().len());
        assert_eq!(d.dual(), m);
        // Dual of K4's planar embedding: 4 triangular vertices, i.e. every
        // dual vertex has degree 3.
        assert!(d.vertices().orbits().iter().all(|o| o.len() == 3));
    }

    #[test]
    fn disjoint_components() {
        // Two triangles, the second on darts 6..12.
        let m = EMap::from_vertex_rotations(
            6,
            &[
                vec![0, 5],
                vec![2, 1],
                vec![4, 3],
                vec![6, 11],
                vec![8, 7],
                vec![10, 9],
            ],
        )
        .unwrap();
        let ce = m.component_euler();
        assert_eq!(ce.len(), 2);
        assert!(ce.iter().all(|(_, chi)| *chi == 2));
    }

    #[test]
    fn rejects_bad_rotations() {
        assert!(EMap::from_vertex_rotations(1, &[vec![0, 0]]).is_err());
        assert!(EMap::from_vertex_rotations(1, &[vec![0]]).is_err());
        assert!(EMap::from_vertex_rotations(1, &[vec![0, 2]]).is_err());
        assert!(EMap::new(vec![1, 2, 0]).is_err());
        assert!(EMap::new(vec![0, 0]).is_err());
    }
}
