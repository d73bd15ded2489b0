//! Double description over the rationals. The core enumerates the extreme
//! rays of {z : R z ≤ 0}: lineality is split off as the nullspace of R, the
//! pointed remainder is handled in the pivot coordinates of R's echelon
//! form, and inequality systems are enumerated through the standard
//! homogenization with a sign-constrained extra coordinate.
//!
//! Every generator this module returns has been re-verified against the
//! input rows, and every ray's active set has been rank-checked for
//! extremality; failures surface as internal errors rather than bad output.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exactmat::{invert, nullspace, rank, rref, RMatrix};
use crate::pptgen::{LinearInequality, LinearSystem, Provenance};
use crate::rat::Rat;

use super::{check_enumeration_dim, lp_feasible, LpOutcome};

const MAX_GENERATORS: usize = 100_000;

fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = Rat::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Scale to a primitive integer vector; direction (sign) is preserved.
fn primitive(v: &[Rat]) -> Vec<Rat> {
    use num_bigint::BigInt;
    let mut l = BigInt::from(1);
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::from(0);
    for n in &ints {
        g = g.gcd(n);
    }
    if g.is_zero() {
        return vec![Rat::zero(); v.len()];
    }
    ints.into_iter()
        .map(|n| Rat::from_integer(n / &g))
        .collect()
}

fn rank_of_rows(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&RMatrix::from_rows(rows.to_vec()).expect("uniform row lengths"))
}

/// Extreme rays and a lineality basis of the cone {z ∈ R^dim : R z ≤ 0}.
pub fn cone_generators(rows: &[Vec<Rat>], dim: usize) -> Result<(Vec<Vec<Rat>>, Vec<Vec<Rat>>)> {
    for r in rows {
        if r.len() != dim {
            return Err(Error::Shape("cone row length differs from dimension".into()));
        }
    }
    if rows.is_empty() {
        let lin: Vec<Vec<Rat>> = (0..dim)
            .map(|j| {
                let mut e = vec![Rat::zero(); dim];
                e[j] = Rat::from_integer(1.into());
                e
            })
            .collect();
        return Ok((Vec::new(), lin));
    }
    let a = RMatrix::from_rows(rows.to_vec())?;
    let lineality: Vec<Vec<Rat>> = nullspace(&a).iter().map(|v| primitive(v)).collect();
    let (_, pivots) = rref(&a);
    let r = pivots.len();
    if r == 0 {
        return Ok((Vec::new(), lineality));
    }
    // pointed part: the section with non-pivot coordinates fixed to zero
    let proj: Vec<Vec<Rat>> = rows
        .iter()
        .map(|row| pivots.iter().map(|&j| row[j].clone()).collect())
        .collect();
    // greedy independent row selection for the initial simplicial cone
    let mut sel: Vec<usize> = Vec::new();
    let mut sel_rows: Vec<Vec<Rat>> = Vec::new();
    for (i, row) in proj.iter().enumerate() {
        if sel.len() == r {
            break;
        }
        sel_rows.push(row.clone());
        if rank_of_rows(&sel_rows) == sel.len() + 1 {
            sel.push(i);
        } else {
            sel_rows.pop();
        }
    }
    debug_assert_eq!(sel.len(), r, "projected rows span rank r");
    let binv = invert(&RMatrix::from_rows(sel_rows)?)?;
    // generators g_j = -(B^-1 e_j): B g_j = -e_j keeps all selected rows ≤ 0
    let mut gens: Vec<Vec<Rat>> = (0..r)
        .map(|j| primitive(&(0..r).map(|i| -binv.at(i, j).clone()).collect::<Vec<_>>()))
        .collect();
    let mut processed: Vec<usize> = sel.clone();
    let zero_set = |g: &[Rat], processed: &[usize]| -> BTreeSet<usize> {
        processed
            .iter()
            .copied()
            .filter(|&i| dot(&proj[i], g).is_zero())
            .collect()
    };
    let mut zsets: Vec<BTreeSet<usize>> = gens.iter().map(|g| zero_set(g, &processed)).collect();
    let mut remaining: Vec<usize> = (0..proj.len()).filter(|i| !sel.contains(i)).collect();
    remaining.sort_by_key(|&i| (proj[i].iter().filter(|c| !c.is_zero()).count(), i));
    for t in remaining {
        let vals: Vec<Rat> = gens.iter().map(|g| dot(&proj[t], g)).collect();
        let mut next_gens: Vec<Vec<Rat>> = Vec::new();
        let mut next_zsets: Vec<BTreeSet<usize>> = Vec::new();
        let pos: Vec<usize> = (0..gens.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..gens.len()).filter(|&k| vals[k].is_negative()).collect();
        for k in 0..gens.len() {
            if !vals[k].is_positive() {
                let mut z = zsets[k].clone();
                if vals[k].is_zero() {
                    z.insert(t);
                }
                next_gens.push(gens[k].clone());
                next_zsets.push(z);
            }
        }
        for &p in &pos {
            for &n in &neg {
                let meet: BTreeSet<usize> =
                    zsets[p].intersection(&zsets[n]).copied().collect();
                let adjacent = (0..gens.len())
                    .filter(|&k| k != p && k != n)
                    .all(|k| !meet.is_subset(&zsets[k]));
                if !adjacent {
                    continue;
                }
                let combo: Vec<Rat> = gens[n]
                    .iter()
                    .zip(&gens[p])
                    .map(|(gn, gp)| &vals[p] * gn - &vals[n] * gp)
                    .collect();
                let combo = primitive(&combo);
                let mut z = meet;
                z.insert(t);
                next_gens.push(combo);
                next_zsets.push(z);
            }
        }
        if next_gens.len() > MAX_GENERATORS {
            return Err(Error::Guard {
                what: "double description generator count".into(),
                requested: next_gens.len(),
                limit: MAX_GENERATORS,
            });
        }
        gens = next_gens;
        zsets = next_zsets;
        processed.push(t);
        // zero sets are recomputed honestly rather than trusted
        for (g, z) in gens.iter().zip(zsets.iter_mut()) {
            *z = zero_set(g, &processed);
        }
    }
    // deduplicate and order canonically
    let set: BTreeSet<Vec<Rat>> = gens.into_iter().collect();
    let mut rays = Vec::new();
    for g in set {
        // extremality: the active rows must leave exactly one free direction
        let active: Vec<Vec<Rat>> = proj
            .iter()
            .filter(|row| dot(row, &g).is_zero())
            .cloned()
            .collect();
        if rank_of_rows(&active) != r - 1 {
            return Err(Error::Domain(
                "internal: double description produced a non-extreme ray".into(),
            ));
        }
        // lift into the full space at the pivot coordinates
        let mut full = vec![Rat::zero(); dim];
        for (k, &j) in pivots.iter().enumerate() {
            full[j] = g[k].clone();
        }
        for row in rows {
            if dot(row, &full).is_positive() {
                return Err(Error::Domain(
                    "internal: double description ray violates a row".into(),
                ));
            }
        }
        rays.push(full);
    }
    for l in &lineality {
        for row in rows {
            if !dot(row, l).is_zero() {
                return Err(Error::Domain(
                    "internal: lineality vector not annihilated".into(),
                ));
            }
        }
    }
    Ok((rays, lineality))
}

/// V-representation: the solution set is conv(vertices) + cone(rays) +
/// span(lineality).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyhedron {
    pub vertices: Vec<Vec<Rat>>,
    pub rays: Vec<Vec<Rat>>,
    pub lineality: Vec<Vec<Rat>>,
}

impl Polyhedron {
    pub fn is_empty_set(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let ser = |vs: &Vec<Vec<Rat>>| -> Vec<Vec<String>> {
            vs.iter()
                .map(|v| v.iter().map(crate::rat::fmt_rat).collect())
                .collect()
        };
        serde_json::json!({
            "vertices": ser(&self.vertices),
            "rays": ser(&self.rays),
            "lineality": ser(&self.lineality),
        })
    }
}

/// Complete V-representation of {x : rows ≤ 0} by double description on the
/// homogenization. Empty systems short-circuit through `lp_feasible`.
pub fn enumerate_polyhedron(system: &LinearSystem) -> Result<Polyhedron> {
    let dim = system.variables().len();
    check_enumeration_dim(dim)?;
    if let LpOutcome::Infeasible(_) = lp_feasible(system)? {
        return Ok(Polyhedron {
            vertices: Vec::new(),
            rays: Vec::new(),
            lineality: Vec::new(),
        });
    }
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(system.len() + 1);
    for (a, c) in system.dense_rows() {
        let mut row = a;
        row.push(c);
        rows.push(row);
    }
    let mut trow = vec![Rat::zero(); dim + 1];
    trow[dim] = -Rat::from_integer(1.into());
    rows.push(trow);
    let (gens, lin) = cone_generators(&rows, dim + 1)?;
    let mut vertices = Vec::new();
    let mut rays = Vec::new();
    for g in gens {
        let t = g[dim].clone();
        if t.is_negative() {
            return Err(Error::Domain(
                "internal: homogenization coordinate went negative".into(),
            ));
        }
        if t.is_zero() {
            rays.push(g[..dim].to_vec());
        } else {
            vertices.push(g[..dim].iter().map(|x| x / &t).collect());
        }
    }
    let mut lineality = Vec::new();
    for l in lin {
        if !l[dim].is_zero() {
            return Err(Error::Domain(
                "internal: lineality with nonzero homogenization coordinate".into(),
            ));
        }
        lineality.push(l[..dim].to_vec());
    }
    vertices.sort();
    rays.sort();
    lineality.sort();
    Ok(Polyhedron {
        vertices,
        rays,
        lineality,
    })
}

/// H-representation from generators, via the cone of valid inequalities
/// (a, c) with a·v + c ≤ 0 on vertices, a·r ≤ 0 on rays, a·l = 0 on
/// lineality. Its extreme rays become the rows; its lineality becomes
/// equality pairs.
pub fn polyhedron_to_h(poly: &Polyhedron, variables: &[String]) -> Result<LinearSystem> {
    let dim = variables.len();
    check_enumeration_dim(dim)?;
    let mut sys = LinearSystem::new(variables.to_vec())?;
    if poly.is_empty_set() {
        let one = Rat::from_integer(1.into());
        sys.push(LinearInequality::new(
            "empty",
            Provenance::External,
            Default::default(),
            one,
        ))?;
        return Ok(sys);
    }
    let mut rows = Vec::new();
    for v in &poly.vertices {
        if v.len() != dim {
            return Err(Error::Shape("vertex length differs from dimension".into()));
        }
        let mut row = v.clone();
        row.push(Rat::from_integer(1.into()));
        rows.push(row);
    }
    for r in &poly.rays {
        let mut row = r.clone();
        row.push(Rat::zero());
        rows.push(row);
    }
    for l in &poly.lineality {
        let mut row = l.clone();
        row.push(Rat::zero());
        rows.push(row.clone());
        rows.push(row.iter().map(|x| -x.clone()).collect());
    }
    let (facets, eqs) = cone_generators(&rows, dim + 1)?;
    let to_coeffs = |g: &[Rat]| {
        variables
            .iter()
            .zip(g.iter())
            .map(|(v, c)| (v.clone(), c.clone()))
            .collect::<std::collections::BTreeMap<String, Rat>>()
    };
    for (k, g) in facets.iter().enumerate() {
        sys.push(LinearInequality::new(
            format!("facet{}", k + 1),
            Provenance::External,
            to_coeffs(&g[..dim]),
            g[dim].clone(),
        ))?;
    }
    for (k, g) in eqs.iter().enumerate() {
        for (tag, sign) in [("+", false), ("-", true)] {
            let gg: Vec<Rat> = if sign {
                g.iter().map(|x| -x.clone()).collect()
            } else {
                g.clone()
            };
            sys.push(LinearInequality::new(
                format!("eq{}{}", k + 1, tag),
                Provenance::External,
                to_coeffs(&gg[..dim]),
                gg[dim].clone(),
            ))?;
        }
    }
    // the generators themselves must satisfy what we emit
    for v in &poly.vertices {
        if !sys.satisfied_at(v)? {
            return Err(Error::Domain(
                "internal: vertex violates its own facet system".into(),
            ));
        }
    }
    for r in &poly.rays {
        for (a, _) in sys.dense_rows() {
            if dot(&a, r).is_positive() {
                return Err(Error::Domain(
                    "internal: ray violates its own facet system".into(),
                ));
            }
        }
    }
    for l in &poly.lineality {
        for (a, _) in sys.dense_rows() {
            if !dot(&a, l).is_zero() {
                return Err(Error::Domain(
                    "internal: lineality violates its own facet system".into(),
                ));
            }
        }
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_int, Rat};
    use crate::sampling;
    use std::collections::BTreeMap;

    fn sys(vars: &[&str], rows: &[(&[i64], i64)]) -> LinearSystem {
        let mut s = LinearSystem::new(vars.iter().map(|v| v.to_string()).collect()).unwrap();
        for (k, (a, c)) in rows.iter().enumerate() {
            let coeffs: BTreeMap<String, Rat> = vars
                .iter()
                .zip(a.iter())
                .map(|(v, x)| (v.to_string(), rat_int(*x)))
                .collect();
            s.push(LinearInequality::new(
                format!("r{k}"),
                Provenance::External,
                coeffs,
                rat_int(*c),
            ))
            .unwrap();
        }
        s
    }

    fn pts(vs: &[&[i64]]) -> Vec<Vec<Rat>> {
        let mut out: Vec<Vec<Rat>> = vs
            .iter()
            .map(|v| v.iter().map(|&x| rat_int(x)).collect())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn unit_square_has_four_vertices() {
        let s = sys(
            &["x", "y"],
            &[
                (&[-1, 0], 0),
                (&[1, 0], -1),
                (&[0, -1], 0),
                (&[0, 1], -1),
            ],
        );
        let p = enumerate_polyhedron(&s).unwrap();
        assert_eq!(p.vertices, pts(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]));
        assert!(p.rays.is_empty());
        assert!(p.lineality.is_empty());
    }

    #[test]
    fn orthant_is_origin_plus_axis_rays() {
        let s = sys(
            &["x", "y", "z"],
            &[(&[-1, 0, 0], 0), (&[0, -1, 0], 0), (&[0, 0, -1], 0)],
        );
        let p = enumerate_polyhedron(&s).unwrap();
        assert_eq!(p.vertices, pts(&[&[0, 0, 0]]));
        assert_eq!(p.rays, pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
        assert!(p.lineality.is_empty());
    }

    #[test]
    fn half_plane_keeps_its_lineality() {
        let s = sys(&["x", "y"], &[(&[1, 0], 0)]);
        let p = enumerate_polyhedron(&s).unwrap();
        assert_eq!(p.vertices, pts(&[&[0, 0]]));
        assert_eq!(p.rays, pts(&[&[-1, 0]]));
        assert_eq!(p.lineality, pts(&[&[0, 1]]));
    }

    #[test]
    fn pinned_line_is_vertex_plus_lineality() {
        let s = sys(&["x", "y"], &[(&[1, 0], -1), (&[-1, 0], 1)]);
        let p = enumerate_polyhedron(&s).unwrap();
        assert_eq!(p.vertices, pts(&[&[1, 0]]));
        assert!(p.rays.is_empty());
        assert_eq!(p.lineality, pts(&[&[0, 1]]));
    }

    #[test]
    fn infeasible_system_enumerates_empty() {
        let s = sys(&["x"], &[(&[1], 1), (&[-1], 1)]);
        let p = enumerate_polyhedron(&s).unwrap();
        assert!(p.is_empty_set());
        assert!(p.rays.is_empty() && p.lineality.is_empty());
    }

    #[test]
    fn probability_simplex_has_unit_vertices() {
        let s = sys(
            &["x", "y", "z"],
            &[
                (&[-1, 0, 0], 0),
                (&[0, -1, 0], 0),
                (&[0, 0, -1], 0),
                (&[1, 1, 1], -1),
                (&[-1, -1, -1], 1),
            ],
        );
        let p = enumerate_polyhedron(&s).unwrap();
        assert_eq!(p.vertices, pts(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]));
        assert!(p.rays.is_empty() && p.lineality.is_empty());
    }

    #[test]
    fn wedge_has_vertex_and_two_rays() {
        let s = sys(&["x", "y"], &[(&[-1, 0], 1), (&[0, -1], 1)]);
        let p = enumerate_polyhedron(&s).unwrap();
        assert_eq!(p.vertices, pts(&[&[1, 1]]));
        assert_eq!(p.rays, pts(&[&[1, 0], &[0, 1]]));
    }

    fn brute_force_vertices(system: &LinearSystem) -> Vec<Vec<Rat>> {
        use crate::exactmat::{solve, RMatrix};
        let rows = system.dense_rows();
        let d = system.variables().len();
        let mut found: std::collections::BTreeSet<Vec<Rat>> = Default::default();
        let mut idx: Vec<usize> = (0..d).collect();
        loop {
            let a: Vec<Vec<Rat>> = idx.iter().map(|&i| rows[i].0.clone()).collect();
            let b: Vec<Vec<Rat>> = idx.iter().map(|&i| vec![-rows[i].1.clone()]).collect();
            if let (Ok(am), Ok(bm)) = (RMatrix::from_rows(a), RMatrix::from_rows(b)) {
                if let Ok(x) = solve(&am, &bm) {
                    let pt: Vec<Rat> = (0..d).map(|j| x.at(j, 0).clone()).collect();
                    if system.satisfied_at(&pt).unwrap() {
                        found.insert(pt);
                    }
                }
            }
            // advance the combination
            let mut k = d;
            loop {
                if k == 0 {
                    return found.into_iter().collect();
                }
                k -= 1;
                if idx[k] + 1 <= rows.len() - (d - k) {
                    idx[k] += 1;
                    for j in k + 1..d {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn random_pointed_systems_match_brute_force() {
        let mut r = sampling::rng(0x51ce_7a11);
        let mut tested = 0;
        while tested < 6 {
            let d = 3;
            let m = 8;
            let mut s = LinearSystem::new((0..d).map(|j| format!("x{j}")).collect()).unwrap();
            for k in 0..m {
                let coeffs: BTreeMap<String, Rat> = (0..d)
                    .map(|j| (format!("x{j}"), sampling::rational(&mut r, 3, 2)))
                    .collect();
                let c = sampling::rational(&mut r, 2, 1);
                s.push(LinearInequality::new(
                    format!("r{k}"),
                    Provenance::External,
                    coeffs,
                    c,
                ))
                .unwrap();
            }
            // skip systems with lineality: brute force has no vertices there
            let a = RMatrix::from_rows(s.dense_rows().into_iter().map(|(a, _)| a).collect());
            if rank(&a.unwrap()) < d {
                continue;
            }
            let p = enumerate_polyhedron(&s).unwrap();
            assert_eq!(p.vertices, brute_force_vertices(&s));
            tested += 1;
        }
    }

    #[test]
    fn square_round_trips_through_v_form() {
        let s = sys(
            &["x", "y"],
            &[
                (&[-1, 0], 0),
                (&[1, 0], -1),
                (&[0, -1], 0),
                (&[0, 1], -1),
            ],
        );
        let p = enumerate_polyhedron(&s).unwrap();
        let h = polyhedron_to_h(&p, s.variables()).unwrap();
        let p2 = enumerate_polyhedron(&h).unwrap();
        assert_eq!(p, p2);
    }

    #[test]
    fn wedge_and_line_round_trip() {
        for s in [
            sys(&["x", "y"], &[(&[-1, 0], 1), (&[0, -1], 1)]),
            sys(&["x", "y"], &[(&[1, 0], -1), (&[-1, 0], 1)]),
            sys(&["x", "y"], &[(&[1, 0], 0)]),
        ] {
            let p = enumerate_polyhedron(&s).unwrap();
            let h = polyhedron_to_h(&p, s.variables()).unwrap();
            let p2 = enumerate_polyhedron(&h).unwrap();
            assert_eq!(p, p2);
        }
    }

    #[test]
    fn empty_polyhedron_round_trips() {
        let p = Polyhedron {
            vertices: vec![],
            rays: vec![],
            lineality: vec![],
        };
        let h = polyhedron_to_h(&p, &["x".to_string()]).unwrap();
        let p2 = enumerate_polyhedron(&h).unwrap();
        assert!(p2.is_empty_set());
    }

    #[test]
    fn duplicate_and_redundant_rows_are_tolerated() {
        let s = sys(
            &["x", "y"],
            &[
                (&[-1, 0], 0),
                (&[-2, 0], 0),
                (&[1, 0], -1),
                (&[0, -1], 0),
                (&[0, 1], -1),
                (&[1, 1], -5),
            ],
        );
        let p = enumerate_polyhedron(&s).unwrap();
        assert_eq!(p.vertices, pts(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]));
    }

    #[test]
    fn json_has_all_three_blocks() {
        let s = sys(&["x", "y"], &[(&[1, 0], 0)]);
        let v = enumerate_polyhedron(&s).unwrap().to_json_value();
        assert!(v["vertices"].is_array());
        assert!(v["rays"].is_array());
        assert!(v["lineality"].is_array());
    }
}
