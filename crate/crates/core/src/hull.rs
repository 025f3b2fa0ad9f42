//! Convex hulls in R^n (2 <= n <= 8) by incremental beneath–beyond insertion
//! with outside sets (furthest point first).
//!
//! The construction works on a simplicial boundary. Points within
//! `ε = 1e-9 · max|coordinate|` of a facet hyperplane count as beneath it, so
//! near-coplanar points never extend the hull. After construction, adjacent
//! simplices lying in a common hyperplane are merged into one facet (a cube
//! face comes back as a single 4-vertex facet).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot};

pub const MAX_DIM: usize = 8;
pub const MAX_POINTS: usize = 10_000;

/// Relative tolerance of the orientation tests.
pub const HULL_EPS: f64 = 1e-9;

/// Slack of the membership and interior tests.
pub const CONTAINS_SLACK: f64 = 1e-12;

/// A facet `{x : ⟨normal, x⟩ = offset} ∩ P` with outward unit normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    #[serde(rename = "vertices")]
    pub vertex_indices: Vec<usize>,
}

/// A full-dimensional convex polytope as vertices plus facet halfspaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Facet>,
}

/// Convex hull of `points` in R^n.
pub fn convex_hull(points: &[Vec<f64>]) -> Result<Polytope> {
    let n = points.first().map(Vec::len).ok_or_else(|| {
        Error::DegenerateInput("empty point set".into())
    })?;
    if !(2..=MAX_DIM).contains(&n) {
        return Err(Error::UnsupportedDimension { dim: n, min: 2, max: MAX_DIM });
    }
    if points.len() > MAX_POINTS {
        return Err(Error::TooManyPoints { count: points.len(), limit: MAX_POINTS });
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidArgument("points of mixed dimension".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coordinate".into()));
    }
    if points.len() < n + 1 {
        return Err(Error::DegenerateInput(format!(
            "{} points cannot span R^{n}",
            points.len()
        )));
    }
    Builder::new(n, points).run()
}

struct WorkFacet {
    verts: Vec<usize>,
    // neigh[k] is the facet across the ridge opposite verts[k]
    neigh: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    outside: Vec<usize>,
    furthest: usize,
    furthest_dist: f64,
    alive: bool,
    stamp: u32,
}

struct Builder<'a> {
    n: usize,
    pts: &'a [Vec<f64>],
    eps: f64,
    interior: Vec<f64>,
    facets: Vec<WorkFacet>,
}

impl<'a> Builder<'a> {
    fn new(n: usize, pts: &'a [Vec<f64>]) -> Self {
        let scale = pts
            .iter()
            .flatten()
            .fold(0.0_f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE);
        Self { n, pts, eps: HULL_EPS * scale, interior: Vec::new(), facets: Vec::new() }
    }

    #[inline]
    fn dist(&self, f: usize, p: usize) -> f64 {
        let fc = &self.facets[f];
        dot(&fc.normal, &self.pts[p]) - fc.offset
    }

    fn initial_simplex(&self) -> Result<Vec<usize>> {
        let pts = self.pts;
        let first = (0..pts.len())
            .min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]))
            .unwrap();
        let mut chosen = vec![first];
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for _ in 0..self.n {
            let origin = &pts[first];
            let mut best = (0.0, usize::MAX);
            for (i, p) in pts.iter().enumerate() {
                let d = linalg::norm(&linalg::reject(&linalg::sub(p, origin), &basis));
                if d > best.0 {
                    best = (d, i);
                }
            }
            if best.0 <= self.eps || best.1 == usize::MAX {
                return Err(Error::DegenerateInput(format!(
                    "points lie in a {}-dimensional affine subspace",
                    chosen.len() - 1
                )));
            }
            let dir = linalg::sub(&pts[best.1], origin);
            basis = linalg::orthonormal_basis(&[basis, vec![dir]].concat(), 0.0);
            chosen.push(best.1);
        }
        Ok(chosen)
    }

    fn make_facet(&self, verts: Vec<usize>) -> WorkFacet {
        let n = self.n;
        let v0 = &self.pts[verts[0]];
        let edges: Vec<Vec<f64>> = verts[1..].iter().map(|&v| linalg::sub(&self.pts[v], v0)).collect();
        let basis = linalg::orthonormal_basis(&edges, 0.0);
        let mut normal = linalg::reject(&linalg::sub(&self.interior, v0), &basis);
        let l = linalg::norm(&normal);
        normal.iter_mut().for_each(|x| *x = -*x / l);
        let offset = verts.iter().map(|&v| dot(&normal, &self.pts[v])).sum::<f64>() / verts.len() as f64;
        WorkFacet {
            verts,
            neigh: vec![usize::MAX; n],
            normal,
            offset,
            outside: Vec::new(),
            furthest: usize::MAX,
            furthest_dist: 0.0,
            alive: true,
            stamp: 0,
        }
    }

    fn assign(&mut self, p: usize, candidates: &[usize]) -> bool {
        for &f in candidates {
            let d = self.dist(f, p);
            if d > self.eps {
                let fc = &mut self.facets[f];
                fc.outside.push(p);
                if d > fc.furthest_dist {
                    fc.furthest_dist = d;
                    fc.furthest = p;
                }
                return true;
            }
        }
        false
    }

    fn run(mut self) -> Result<Polytope> {
        let n = self.n;
        let simplex = self.initial_simplex()?;
        self.interior = vec![0.0; n];
        for &v in &simplex {
            for (c, x) in self.interior.iter_mut().zip(&self.pts[v]) {
                *c += x / (n + 1) as f64;
            }
        }
        for j in 0..=n {
            let verts: Vec<usize> = (0..=n).filter(|&m| m != j).map(|m| simplex[m]).collect();
            let mut f = self.make_facet(verts);
            // facet j omits simplex[j]; across the ridge opposite simplex[m] lies facet m
            f.neigh = (0..=n).filter(|&m| m != j).collect();
            self.facets.push(f);
        }
        let initial: Vec<usize> = (0..=n).collect();
        let mut in_simplex = vec![false; self.pts.len()];
        simplex.iter().for_each(|&v| in_simplex[v] = true);
        for p in 0..self.pts.len() {
            if !in_simplex[p] {
                self.assign(p, &initial);
            }
        }

        let mut pending: Vec<usize> = initial;
        let mut stamp = 0u32;
        let mut visible = Vec::new();
        let mut stack = Vec::new();
        let mut ridge_map: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        while let Some(f0) = pending.pop() {
            if !self.facets[f0].alive || self.facets[f0].outside.is_empty() {
                continue;
            }
            let apex = self.facets[f0].furthest;
            stamp += 1;
            visible.clear();
            stack.clear();
            stack.push(f0);
            self.facets[f0].stamp = stamp;
            while let Some(f) = stack.pop() {
                visible.push(f);
                for k in 0..n {
                    let g = self.facets[f].neigh[k];
                    if self.facets[g].stamp != stamp && self.dist(g, apex) > self.eps {
                        self.facets[g].stamp = stamp;
                        stack.push(g);
                    }
                }
            }

            let mut created = Vec::new();
            ridge_map.clear();
            for &f in &visible {
                for k in 0..n {
                    let g = self.facets[f].neigh[k];
                    if self.facets[g].stamp == stamp {
                        continue;
                    }
                    let mut verts: Vec<usize> = self.facets[f]
                        .verts
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, &v)| v)
                        .collect();
                    verts.push(apex);
                    let mut nf = self.make_facet(verts);
                    let id = self.facets.len();
                    nf.neigh[n - 1] = g;
                    if let Some(slot) = self.facets[g].neigh.iter().position(|&x| x == f) {
                        self.facets[g].neigh[slot] = id;
                    }
                    for pos in 0..n - 1 {
                        let mut key: Vec<usize> = nf.verts[..n - 1]
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != pos)
                            .map(|(_, &v)| v)
                            .collect();
                        key.sort_unstable();
                        match ridge_map.remove(&key) {
                            Some((other, other_pos)) => {
                                nf.neigh[pos] = other;
                                self.facets[other].neigh[other_pos] = id;
                            }
                            None => {
                                ridge_map.insert(key, (id, pos));
                            }
                        }
                    }
                    self.facets.push(nf);
                    created.push(id);
                }
            }
            if !ridge_map.is_empty() {
                return Err(Error::DegenerateInput(
                    "horizon is not a closed ridge cycle (numerically degenerate input)".into(),
                ));
            }

            let mut orphans = Vec::new();
            for &f in &visible {
                let fc = &mut self.facets[f];
                fc.alive = false;
                orphans.append(&mut fc.outside);
            }
            for p in orphans {
                if p != apex {
                    self.assign(p, &created);
                }
            }
            pending.extend(created.iter().copied().filter(|&f| !self.facets[f].outside.is_empty()));
        }
        Ok(self.finish())
    }

    fn finish(self) -> Polytope {
        let n = self.n;
        let alive: Vec<usize> = (0..self.facets.len()).filter(|&f| self.facets[f].alive).collect();
        let mut local = vec![usize::MAX; self.facets.len()];
        for (i, &f) in alive.iter().enumerate() {
            local[f] = i;
        }

        // merge neighbouring simplices that share a hyperplane
        let mut parent: Vec<usize> = (0..alive.len()).collect();
        fn root(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (i, &f) in alive.iter().enumerate() {
            for &g in &self.facets[f].neigh {
                let j = local[g];
                let (a, b) = (&self.facets[f], &self.facets[g]);
                let same_plane = a.normal.iter().zip(&b.normal).all(|(x, y)| (x - y).abs() < HULL_EPS)
                    && (a.offset - b.offset).abs() <= self.eps;
                if same_plane {
                    let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }

        let mut used = vec![false; self.pts.len()];
        for &f in &alive {
            self.facets[f].verts.iter().for_each(|&v| used[v] = true);
        }
        let mut remap = vec![usize::MAX; self.pts.len()];
        let mut vertices = Vec::new();
        for (i, &u) in used.iter().enumerate() {
            if u {
                remap[i] = vertices.len();
                vertices.push(self.pts[i].clone());
            }
        }

        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); alive.len()];
        for i in 0..alive.len() {
            let r = root(&mut parent, i);
            groups[r].push(i);
        }
        let mut facets = Vec::new();
        for group in groups.into_iter().filter(|g| !g.is_empty()) {
            if group.len() == 1 {
                let fc = &self.facets[alive[group[0]]];
                facets.push(Facet {
                    normal: fc.normal.clone(),
                    offset: fc.offset,
                    vertex_indices: fc.verts.iter().map(|&v| remap[v]).collect(),
                });
                continue;
            }
            let mut normal = vec![0.0; n];
            let mut verts = Vec::new();
            for &i in &group {
                let fc = &self.facets[alive[i]];
                normal.iter_mut().zip(&fc.normal).for_each(|(a, b)| *a += b);
                verts.extend(fc.verts.iter().map(|&v| remap[v]));
            }
            let l = linalg::norm(&normal);
            normal.iter_mut().for_each(|x| *x /= l);
            verts.sort_unstable();
            verts.dedup();
            let offset = verts.iter().map(|&v| dot(&normal, &vertices[v])).sum::<f64>() / verts.len() as f64;
            facets.push(Facet { normal, offset, vertex_indices: verts });
        }
        Polytope { dim: n, vertices, facets }
    }
}

impl Polytope {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    /// Origin strictly inside: every facet offset exceeds the slack.
    pub fn origin_in_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset > CONTAINS_SLACK)
    }

    /// Every facet is an (n-1)-simplex.
    pub fn is_simplicial(&self) -> bool {
        self.facets.iter().all(|f| f.vertex_indices.len() == self.dim)
    }

    /// Halfspace membership; the boundary counts as inside.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_with_slack(x, CONTAINS_SLACK)
    }

    pub fn contains_with_slack(&self, x: &[f64], slack: f64) -> bool {
        self.facets.iter().all(|f| dot(&f.normal, x) <= f.offset + slack)
    }

    pub fn max_vertex_norm(&self) -> f64 {
        self.vertices.iter().map(|v| linalg::norm(v)).fold(0.0, f64::max)
    }

    pub fn facet_points(&self, facet: usize) -> Vec<Vec<f64>> {
        self.facets[facet].vertex_indices.iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Decomposition of a facet into (n-1)-simplices (as vertex indices).
    /// Simplicial facets return themselves; larger facets are fanned from one
    /// of their extreme vertices.
    pub fn facet_simplices(&self, facet: usize) -> Vec<Vec<usize>> {
        let f = &self.facets[facet];
        if f.vertex_indices.len() == self.dim {
            return vec![f.vertex_indices.clone()];
        }
        let (sub, local) = self.facet_subhull(facet);
        let ids = &f.vertex_indices;
        match sub {
            None => {
                // n = 2: a segment, keep its two extreme points
                vec![vec![ids[local[0]], ids[local[1]]]]
            }
            Some(sub) => {
                let apex_local = sub.facets[0].vertex_indices[0];
                let mut out = Vec::new();
                for sf in &sub.facets {
                    if sf.vertex_indices.contains(&apex_local) {
                        continue;
                    }
                    for simplex in sub.facet_simplices_of(sf) {
                        let mut s: Vec<usize> = vec![ids[local[apex_local]]];
                        s.extend(simplex.iter().map(|&v| ids[local[v]]));
                        out.push(s);
                    }
                }
                out
            }
        }
    }

    fn facet_simplices_of(&self, f: &Facet) -> Vec<Vec<usize>> {
        let idx = self.facets.iter().position(|g| std::ptr::eq(g, f)).unwrap();
        self.facet_simplices(idx)
    }

    // Hull of a facet inside its own hyperplane. For n = 2 returns the indices
    // (into the facet's vertex list) of the two extreme points.
    fn facet_subhull(&self, facet: usize) -> (Option<Polytope>, Vec<usize>) {
        let pts = self.facet_points(facet);
        let origin = pts[0].clone();
        let edges: Vec<Vec<f64>> = pts[1..].iter().map(|p| linalg::sub(p, &origin)).collect();
        let basis = linalg::orthonormal_basis(&edges, 1e-12);
        let coords: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| {
                let d = linalg::sub(p, &origin);
                basis.iter().map(|b| dot(&d, b)).collect()
            })
            .collect();
        if self.dim == 2 {
            let lo = (0..coords.len()).min_by(|&a, &b| coords[a][0].total_cmp(&coords[b][0])).unwrap();
            let hi = (0..coords.len()).max_by(|&a, &b| coords[a][0].total_cmp(&coords[b][0])).unwrap();
            return (None, vec![lo, hi]);
        }
        let sub = convex_hull(&coords).expect("facet spans its hyperplane");
        // map sub-hull vertex indices back to positions in the facet's list
        let local = sub
            .vertices
            .iter()
            .map(|v| coords.iter().position(|c| c == v).unwrap())
            .collect();
        (Some(sub), local)
    }

    /// (n-1)-volume of a facet.
    pub fn facet_area(&self, facet: usize) -> f64 {
        self.facet_simplices(facet)
            .iter()
            .map(|s| linalg::simplex_volume(&s.iter().map(|&v| self.vertices[v].clone()).collect::<Vec<_>>()))
            .sum()
    }

    /// Total boundary measure (exact, from Gram determinants).
    pub fn surface_area(&self) -> f64 {
        (0..self.facets.len()).map(|i| self.facet_area(i)).sum()
    }

    /// n-volume by coning each facet simplex to an interior reference point.
    pub fn volume(&self) -> f64 {
        let n = self.dim as f64;
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            c.iter_mut().zip(v).for_each(|(a, b)| *a += b / self.vertices.len() as f64);
        }
        (0..self.facets.len())
            .map(|i| {
                let h = self.facets[i].offset - dot(&self.facets[i].normal, &c);
                h * self.facet_area(i) / n
            })
            .sum()
    }

    /// (n-2)-faces, each as a sorted list of vertex indices.
    pub fn ridges(&self) -> Vec<Vec<usize>> {
        let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
        let mut out = Vec::new();
        for (i, f) in self.facets.iter().enumerate() {
            let faces: Vec<Vec<usize>> = if f.vertex_indices.len() == self.dim {
                (0..self.dim)
                    .map(|k| {
                        f.vertex_indices
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != k)
                            .map(|(_, &v)| v)
                            .collect()
                    })
                    .collect()
            } else {
                let (sub, local) = self.facet_subhull(i);
                match sub {
                    None => local.iter().map(|&l| vec![f.vertex_indices[l]]).collect(),
                    Some(sub) => sub
                        .facets
                        .iter()
                        .map(|sf| sf.vertex_indices.iter().map(|&v| f.vertex_indices[local[v]]).collect())
                        .collect(),
                }
            };
            for mut r in faces {
                r.sort_unstable();
                if seen.insert(r.clone(), ()).is_none() {
                    out.push(r);
                }
            }
        }
        out
    }

    /// Facet adjacency through shared ridges (simplicial polytopes only).
    pub fn facet_adjacency(&self) -> Option<Vec<Vec<usize>>> {
        if !self.is_simplicial() {
            return None;
        }
        let mut map: HashMap<Vec<usize>, usize> = HashMap::with_capacity(self.facets.len() * self.dim);
        let mut adj = vec![Vec::with_capacity(self.dim); self.facets.len()];
        for (i, f) in self.facets.iter().enumerate() {
            for k in 0..self.dim {
                let mut key: Vec<usize> = f
                    .vertex_indices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &v)| v)
                    .collect();
                key.sort_unstable();
                match map.remove(&key) {
                    Some(j) => {
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                    None => {
                        map.insert(key, i);
                    }
                }
            }
        }
        map.is_empty().then_some(adj)
    }

    pub fn translated(&self, shift: &[f64]) -> Polytope {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(shift).map(|(a, b)| a + b).collect())
            .collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet { offset: f.offset + dot(&f.normal, shift), ..f.clone() })
            .collect();
        Polytope { dim: self.dim, vertices, facets }
    }

    pub fn scaled(&self, factor: f64) -> Polytope {
        assert!(factor > 0.0);
        Polytope {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().map(|x| x * factor).collect()).collect(),
            facets: self.facets.iter().map(|f| Facet { offset: f.offset * factor, ..f.clone() }).collect(),
        }
    }

    /// `[-a, a]^n`.
    pub fn hypercube(n: usize, a: f64) -> Result<Polytope> {
        let pts = (0..1usize << n)
            .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { a } else { -a }).collect())
            .collect::<Vec<Vec<f64>>>();
        convex_hull(&pts)
    }

    /// Convex hull of `±a e_i`.
    pub fn cross_polytope(n: usize, a: f64) -> Result<Polytope> {
        let mut pts = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [a, -a] {
                let mut p = vec![0.0; n];
                p[i] = s;
                pts.push(p);
            }
        }
        convex_hull(&pts)
    }

    /// Structural checks for polytopes read from disk.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if !(2..=MAX_DIM).contains(&n) {
            return Err(Error::UnsupportedDimension { dim: n, min: 2, max: MAX_DIM });
        }
        if self.vertices.iter().any(|v| v.len() != n || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidPolytope("vertex of wrong dimension or non-finite".into()));
        }
        if self.facets.len() < n + 1 {
            return Err(Error::InvalidPolytope(format!("{} facets cannot bound a body", self.facets.len())));
        }
        let scale = self.vertices.iter().flatten().fold(1.0_f64, |m, x| m.max(x.abs()));
        let tol = HULL_EPS * scale;
        for (i, f) in self.facets.iter().enumerate() {
            if f.normal.len() != n || (linalg::norm(&f.normal) - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidPolytope(format!("facet {i}: normal is not a unit vector")));
            }
            if f.vertex_indices.len() < n || f.vertex_indices.iter().any(|&v| v >= self.vertices.len()) {
                return Err(Error::InvalidPolytope(format!("facet {i}: bad vertex list")));
            }
            for &v in &f.vertex_indices {
                if (dot(&f.normal, &self.vertices[v]) - f.offset).abs() > tol {
                    return Err(Error::InvalidPolytope(format!("facet {i}: vertex {v} off its hyperplane")));
                }
            }
            for (j, v) in self.vertices.iter().enumerate() {
                if dot(&f.normal, v) > f.offset + tol {
                    return Err(Error::InvalidPolytope(format!("vertex {j} beyond facet {i}")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polytope serializes")
    }

    pub fn from_json(text: &str) -> Result<Polytope> {
        let p: Polytope = serde_json::from_str(text).map_err(|e| Error::InvalidPolytope(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }
}

/// Point-location accelerator. For a simplicial polytope with the origin
/// inside, the facet maximizing `⟨ξ_i, x⟩ / t_i` is found by steepest ascent
/// over the facet adjacency graph (vertex–edge graph of the polar body).
/// Otherwise every facet is scanned.
pub struct Locator<'a> {
    poly: &'a Polytope,
    polar: Vec<f64>,
    adj: Option<Vec<Vec<usize>>>,
    starts: Vec<usize>,
}

impl<'a> Locator<'a> {
    pub fn new(poly: &'a Polytope) -> Self {
        let adj = if poly.origin_in_interior() { poly.facet_adjacency() } else { None };
        let n = poly.dim;
        let mut polar = Vec::with_capacity(poly.facets.len() * n);
        for f in &poly.facets {
            polar.extend(f.normal.iter().map(|x| x / f.offset));
        }
        let m = poly.facets.len();
        let k = ((m as f64).sqrt().ceil() as usize).clamp(1, 64).min(m);
        let starts = (0..k).map(|i| i * m / k).collect();
        Self { poly, polar, adj, starts }
    }

    #[inline]
    fn polar_dot(&self, f: usize, x: &[f64]) -> f64 {
        let n = self.poly.dim;
        dot(&self.polar[f * n..(f + 1) * n], x)
    }

    /// Facet whose hyperplane the ray from the origin through `x` crosses
    /// first, when the accelerated path applies.
    pub fn exit_facet(&self, x: &[f64]) -> Option<usize> {
        let adj = self.adj.as_ref()?;
        let (mut cur, mut val) = self
            .starts
            .iter()
            .map(|&f| (f, self.polar_dot(f, x)))
            .fold((usize::MAX, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        loop {
            let mut next = cur;
            for &g in &adj[cur] {
                let v = self.polar_dot(g, x);
                if v > val {
                    val = v;
                    next = g;
                }
            }
            if next == cur {
                return Some(cur);
            }
            cur = next;
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self.exit_facet(x) {
            Some(f) => {
                let fc = &self.poly.facets[f];
                dot(&fc.normal, x) <= fc.offset + CONTAINS_SLACK
            }
            None => self.poly.contains(x),
        }
    }
}
