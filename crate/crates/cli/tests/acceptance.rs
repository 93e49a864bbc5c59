//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use logfan_core::degeneration::{build_model, check_polarization, DegenerationData, ModelOptions, ModelReport};
use logfan_core::lattice::{smith_normal_form, GroundData, GroupAction, IVec, IntegerMatrix, Lattice, LatticeLabel};
use logfan_core::monoids::{f_sigma_dual, hilbert_basis, kato_log_smooth_check, AffineMonoid, KatoVerdict, MonoidHom};
use logfan_core::polyhedra::{dual_cone, RationalCone};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn big(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn small(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).expect("small entry")).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn matrix(rows: &[Vec<i64>]) -> IntegerMatrix {
    if rows.is_empty() {
        return IntegerMatrix::zeros(0, 0);
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    IntegerMatrix::from_i64(&refs)
}

fn sign_group(r: usize, p: u64) -> GroupAction {
    let mut g = IntegerMatrix::identity(r);
    for i in 0..r {
        g[(i, i)] = BigInt::from(-1);
    }
    GroupAction::new(r, vec![("minus".into(), g)], Some(2), p).unwrap()
}

fn degeneration(rows: &[Vec<i64>], group: GroupAction) -> Option<DegenerationData> {
    let p = group.residue_char;
    DegenerationData::new(matrix(rows), None, None, None, group, GroundData::with_residue_char(p).unwrap()).ok()
}

/// Symmetric matrices with entries uniform in [-6, 6], kept when positive definite.
fn random_forms(rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    while out.len() < count {
        let r = 1 + out.len() % 3;
        let mut m = vec![vec![0i64; r]; r];
        for i in 0..r {
            for j in i..r {
                m[i][j] = rng.gen_range(-6..=6);
                m[j][i] = m[i][j];
            }
        }
        if matrix(&m).positive_definite_witness().is_ok() {
            out.push(m);
        }
    }
    out
}

fn model(d: &DegenerationData) -> Result<ModelReport, String> {
    let m = build_model(d, &ModelOptions::default()).map_err(|e| e.to_string())?;
    match &m.failure {
        None => Ok(m),
        Some(f) => Err(format!("b = {:?}: failed at {}: {}", d.b, f.stage.name(), f.message)),
    }
}

/// Log smooth iff the image of 1 is primitive in the group of `sigma^dual n M`.
fn primitive_image(f: &MonoidHom) -> bool {
    f.gp_matrix.cols() == 1 && small(&f.gp_matrix.column(0)).into_iter().fold(0, gcd) == 1
}

struct Shared {
    forms: Vec<Vec<Vec<i64>>>,
    models: Vec<(DegenerationData, ModelReport)>,
}

fn criterion_1(shared: &mut Shared) -> Check {
    let start = Instant::now();
    let mut cones = 0;
    for rows in &shared.forms {
        let d = degeneration(rows, GroupAction::trivial(rows.len(), 0)).ok_or("instance rejected")?;
        let m = model(&d)?;
        for cone in m.sigma.as_ref().unwrap().cones() {
            let f = f_sigma_dual(cone).map_err(|e| e.to_string())?;
            let verdict = kato_log_smooth_check(&f).verdict;
            ensure!(verdict.is_log_smooth(), "b = {rows:?}, cone {:?}: {verdict:?}", cone.extreme_rays());
            ensure!(primitive_image(&f), "b = {rows:?}: oracle rejects cone {:?}", cone.extreme_rays());
            cones += 1;
        }
        ensure!(m.charts.iter().all(|c| c.kato.verdict.is_log_smooth()), "b = {rows:?}: orbit chart not log smooth");
        shared.models.push((d, m));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:.1?}");
    Ok(format!("{} instances, {cones} cones, {elapsed:.1?}", shared.forms.len()))
}

fn prime_factors(mut n: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut p = 2;
    while n > 1 {
        while n % p == 0 {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    out
}

fn criterion_2(_: &mut Shared) -> Check {
    for m in 2..=10i64 {
        let f = MonoidHom::new(AffineMonoid::free(1), AffineMonoid::free(1), matrix(&[vec![m]])).map_err(|e| e.to_string())?;
        let report = kato_log_smooth_check(&f);
        ensure!(report.verdict == KatoVerdict::FailsTorsionFree(vec![BigInt::from(m)]), "m = {m}: {:?}", report.verdict);
        // Z / mZ by brute force: residues of 0..m^2 modulo the image.
        let classes: HashSet<i64> = (0..m * m).map(|x| x.rem_euclid(m)).collect();
        let divisors: Vec<i64> = report.cokernel.torsion.iter().map(|d| i64::try_from(d).unwrap()).collect();
        let order: i64 = divisors.iter().product();
        ensure!(order == classes.len() as i64, "m = {m}: cokernel order {order}");
        let mut factors: Vec<i64> = divisors.iter().flat_map(|&d| prime_factors(d)).collect();
        factors.sort();
        ensure!(factors == prime_factors(m), "m = {m}: factors {factors:?}");
    }
    Ok("m = 2..10 fail with divisors [m]".into())
}

/// A relation `x*y = pi` between two distinct chart variables.
fn is_node(relation: &str) -> bool {
    let Some((lhs, rhs)) = relation.split_once(" = ") else { return false };
    let vars: Vec<&str> = lhs.split('*').collect();
    rhs == "pi" && vars.len() == 2 && vars[0] != vars[1]
}

fn criterion_3(_: &mut Shared) -> Check {
    let mut slowest = Duration::ZERO;
    for n in 1..=12i64 {
        let start = Instant::now();
        let d = degeneration(&[vec![n]], GroupAction::trivial(1, 0)).unwrap();
        let m = model(&d)?;
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        ensure!(elapsed < Duration::from_secs(1), "n = {n} took {elapsed:.1?}");
        let complex = m.dual_complex.as_ref().unwrap();
        ensure!(complex.cycle_length == Some(n as usize), "n = {n}: cycle {:?}", complex.cycle_length);
        // A connected graph with n vertices, n edges and all degrees 2 is a single cycle.
        let edges = complex.edges();
        let mut degree = vec![0; complex.vertices().len()];
        let mut parent: Vec<usize> = (0..degree.len()).collect();
        fn root(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] == x {
                x
            } else {
                let r = root(p, p[x]);
                p[x] = r;
                r
            }
        }
        for &(a, b) in &edges {
            degree[a] += 1;
            degree[b] += 1;
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            parent[ra] = rb;
        }
        let components: HashSet<usize> = (0..degree.len()).map(|x| root(&mut parent, x)).collect();
        ensure!(
            degree.len() == n as usize && edges.len() == n as usize,
            "n = {n}: {} vertices, {} edges",
            degree.len(),
            edges.len()
        );
        ensure!(degree.iter().all(|&k| k == 2) && components.len() == 1, "n = {n}: not a cycle");
        for c in m.charts.iter().filter(|c| c.dim == 2) {
            let e = c.chart.eliminated();
            ensure!(e.len() == 1 && is_node(&e[0]), "n = {n}: chart {e:?}");
        }
    }
    Ok(format!("n = 1..12, slowest {slowest:.1?}"))
}

/// Unit-square cells of Z^2 modulo nZ^2 by direct enumeration.
fn square_counts(n: i64) -> Vec<usize> {
    let modn = |x: i64| x.rem_euclid(n);
    let mut vertices = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let mut squares = BTreeSet::new();
    for i in 0..2 * n {
        for j in 0..2 * n {
            vertices.insert((modn(i), modn(j)));
            edges.insert((modn(i), modn(j), 0));
            edges.insert((modn(i), modn(j), 1));
            squares.insert((modn(i), modn(j)));
        }
    }
    vec![vertices.len(), edges.len(), squares.len()]
}

fn criterion_4(_: &mut Shared) -> Check {
    for n in 1..=4i64 {
        let d = degeneration(&[vec![n, 0], vec![0, n]], GroupAction::trivial(2, 0)).unwrap();
        let m = model(&d)?;
        let complex = m.dual_complex.as_ref().unwrap();
        let nn = (n * n) as usize;
        ensure!(complex.counts() == vec![nn, 2 * nn, nn], "n = {n}: counts {:?}", complex.counts());
        ensure!(complex.counts() == square_counts(n), "n = {n}: enumeration gives {:?}", square_counts(n));
        ensure!(complex.euler_characteristic == 0, "n = {n}: Euler {}", complex.euler_characteristic);
        let squares: Vec<_> = m.charts.iter().filter(|c| c.dim == 3).collect();
        ensure!(squares.len() == nn, "n = {n}: {} square charts", squares.len());
        for c in squares {
            let mut e = c.chart.eliminated();
            e.sort();
            ensure!(e == ["a*c = pi", "b*d = pi"], "n = {n}: chart {e:?}");
            let vars: HashSet<&str> = e.iter().flat_map(|r| r.split(" = ").next().unwrap().split('*')).collect();
            ensure!(vars.len() == 4 && e.iter().all(|r| is_node(r)), "n = {n}: chart {e:?}");
            ensure!(!c.smooth_cone, "n = {n}: square cone reported smooth");
            ensure!(c.kato.verdict.is_log_smooth(), "n = {n}: {:?}", c.kato.verdict);
        }
    }
    Ok("n = 1..4 give (n^2, 2n^2, n^2), Euler 0, charts {ac = pi, bd = pi}".into())
}

fn criterion_5(shared: &mut Shared) -> Check {
    if shared.models.len() < shared.forms.len() {
        shared.models.clear();
        for rows in &shared.forms {
            let d = degeneration(rows, GroupAction::trivial(rows.len(), 0)).ok_or("instance rejected")?;
            let m = model(&d)?;
            shared.models.push((d, m));
        }
    }
    let mut perturbations = 0;
    for (d, m) in &shared.models {
        let report = m.polarization_report.as_ref().unwrap();
        ensure!(report.clauses.len() == 5 && report.clauses.iter().all(|(_, ok)| *ok), "b = {:?}: {:?}", d.b, report.clauses);
        let h = m.polarization.as_ref().unwrap();
        let k = num_rational::BigRational::from_integer(h.k.clone());
        ensure!(h.values.values().all(|v| (v * &k).is_integer()), "b = {:?}: k h not integral", d.b);
        let sigma = m.sigma.as_ref().unwrap();
        let action = d.affine_action().map_err(|e| e.to_string())?;
        let keys: Vec<&IVec> = h.values.keys().collect();
        let picks: BTreeSet<usize> = [0, keys.len() / 3, 2 * keys.len() / 3, keys.len() - 1].into_iter().collect();
        for vertex in picks.into_iter().map(|i| keys[i]) {
            let mut bad = h.clone();
            *bad.values.get_mut(vertex).unwrap() += num_rational::BigRational::from_integer(BigInt::from(1));
            let r = check_polarization(&bad, sigma, &action).map_err(|e| e.to_string())?;
            ensure!(!r.passed, "b = {:?}: perturbation at {vertex:?} accepted", d.b);
            ensure!(r.witnesses.iter().any(|w| w.wall.is_some()), "b = {:?}: no witness wall at {vertex:?}", d.b);
            perturbations += 1;
        }
    }
    Ok(format!("{} instances, {perturbations} perturbations rejected", shared.models.len()))
}

/// Affine maps `x -> g x + t` (g in `linear`, t in the window) fixing the vertex set.
fn brute_stabilizer(vertices: &[Vec<i64>], linear: &[Vec<Vec<i64>>], window: i64) -> usize {
    let r = vertices[0].len();
    let target: BTreeSet<Vec<i64>> = vertices.iter().cloned().collect();
    let shifts: Vec<Vec<i64>> = (0..r).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|p| (-window..=window).map(move |x| [p.clone(), vec![x]].concat())).collect()
    });
    let mut count = 0;
    for g in linear {
        for t in &shifts {
            let image: BTreeSet<Vec<i64>> = vertices.iter().map(|v| (0..r).map(|i| dot(&g[i], v) + t[i]).collect()).collect();
            if image == target {
                count += 1;
            }
        }
    }
    count
}

fn criterion_6(_: &mut Shared) -> Check {
    let sign = brute_stabilizer(&[vec![0]], &[vec![vec![1]], vec![vec![-1]]], 3);
    ensure!(sign == 2, "enumerated vertex stabilizer {sign}");
    let rot = vec![vec![0, -1], vec![1, 0]];
    let powers: Vec<Vec<Vec<i64>>> = (0..4)
        .scan(vec![vec![1, 0], vec![0, 1]], |g, _| {
            let cur = g.clone();
            *g = (0..2).map(|i| (0..2).map(|j| rot[i][0] * cur[0][j] + rot[i][1] * cur[1][j]).collect()).collect();
            Some(cur)
        })
        .collect();
    let square = brute_stabilizer(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]], &powers, 2);
    ensure!(square == 4, "enumerated square stabilizer {square}");
    for p in [2u64, 3, 5] {
        let d = degeneration(&[vec![2]], sign_group(1, p)).unwrap();
        let m = model(&d)?;
        let t = m.tameness.as_ref().unwrap();
        let v = t.orbits.iter().find(|o| o.representative == vec![big(&[0, 1])]).ok_or("vertex 0 orbit missing")?;
        ensure!(v.stabilizer_order == sign, "p = {p}: vertex stabilizer {}", v.stabilizer_order);
        ensure!(v.wild == (p == 2), "p = {p}: wild = {}", v.wild);

        let group = GroupAction::new(2, vec![("rot".into(), matrix(&rot))], Some(4), p).unwrap();
        let d = degeneration(&[vec![1, 0], vec![0, 1]], group).unwrap();
        let m = model(&d)?;
        let t = m.tameness.as_ref().unwrap();
        let s = t.orbits.iter().find(|o| o.dim == 3).ok_or("square orbit missing")?;
        ensure!(s.stabilizer_order == square, "p = {p}: square stabilizer {}", s.stabilizer_order);
        ensure!(s.wild == (p == 2), "p = {p}: wild = {}", s.wild);
    }
    Ok("stabilizers 2 and 4, wild exactly for p = 2".into())
}

fn det(m: &[Vec<i128>]) -> i128 {
    if m.is_empty() {
        return 1;
    }
    (0..m.len())
        .map(|j| {
            let minor: Vec<Vec<i128>> =
                m[1..].iter().map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            (if j % 2 == 0 { 1 } else { -1 }) * m[0][j] * det(&minor)
        })
        .sum()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    out.extend(subsets(n - 1, k - 1).into_iter().map(|mut s| {
        s.push(n - 1);
        s
    }));
    out
}

/// Nonzero invariant factors as quotients of gcds of k x k minors.
fn minor_invariants(a: &[Vec<i64>]) -> Vec<i64> {
    let (rows, cols) = (a.len(), a[0].len());
    let mut divisors = vec![1i128];
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i128>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j] as i128).collect()).collect();
                g = gcd(g as i64, det(&minor) as i64) as i128;
            }
        }
        if g == 0 {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| (w[1] / w[0]) as i64).collect()
}

fn inside(facets: &[Vec<i64>], x: &[i64]) -> bool {
    facets.iter().all(|f| dot(f, x) >= 0)
}

/// Irreducible lattice points of a pointed full cone, found in the box spanned
/// by the zonotope of its extreme rays, and all lattice points of that box in the cone.
fn box_irreducibles(c: &RationalCone) -> (BTreeSet<Vec<i64>>, Vec<Vec<i64>>) {
    let facets: Vec<Vec<i64>> = c.facets().iter().map(|f| small(f)).collect();
    let extreme: Vec<Vec<i64>> = c.extreme_rays().iter().map(|r| small(r)).collect();
    let d = extreme[0].len();
    let grading: Vec<i64> = (0..d).map(|j| facets.iter().map(|f| f[j]).sum()).collect();
    let bound: Vec<i64> = (0..d).map(|j| extreme.iter().map(|r| r[j].abs()).sum()).collect();
    let mut points: Vec<Vec<i64>> = bound
        .iter()
        .fold(vec![vec![]], |acc: Vec<Vec<i64>>, &b| {
            acc.into_iter().flat_map(|p| (-b..=b).map(move |x| [p.clone(), vec![x]].concat())).collect()
        })
        .into_iter()
        .filter(|x| x.iter().any(|&v| v != 0) && inside(&facets, x))
        .collect();
    points.sort_by_key(|x| dot(&grading, x));
    let mut irr: Vec<Vec<i64>> = Vec::new();
    for x in &points {
        let reducible = irr.iter().any(|y| {
            let rest: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            rest.iter().any(|&v| v != 0) && inside(&facets, &rest)
        });
        if !reducible {
            irr.push(x.clone());
        }
    }
    (irr.into_iter().collect(), points)
}

fn random_rays(rng: &mut ChaCha8Rng, max_rays: usize, entry: i64) -> Vec<Vec<i64>> {
    let d = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=max_rays);
    (0..k)
        .map(|_| loop {
            let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-entry..=entry)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect()
}

fn cone(rays: &[Vec<i64>]) -> RationalCone {
    let gens: Vec<IVec> = rays.iter().map(|r| big(r)).collect();
    RationalCone::from_rays(Lattice::new(rays[0].len(), LatticeLabel::N), &gens).unwrap()
}

fn criterion_7(_: &mut Shared) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    for case in 0..500 {
        let (rows, cols) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let am = matrix(&a);
        let s = smith_normal_form(&am);
        ensure!(&(&s.u * &am) * &s.v == s.d, "matrix {case}: U A V != D");
        ensure!(s.u.is_unimodular() && s.v.is_unimodular() && s.d.is_diagonal(), "matrix {case}: not unimodular or diagonal");
        let diag = small(&s.diagonal());
        let nonzero: Vec<i64> = diag.iter().copied().filter(|&x| x != 0).collect();
        ensure!(diag.iter().all(|&x| x >= 0) && diag[..nonzero.len()] == nonzero[..], "matrix {case}: diagonal {diag:?}");
        ensure!(nonzero.windows(2).all(|w| w[1] % w[0] == 0), "matrix {case}: divisibility {diag:?}");
        ensure!(nonzero == minor_invariants(&a), "matrix {case}: minors give {:?}", minor_invariants(&a));
    }
    for case in 0..200 {
        let rays = random_rays(&mut rng, 5, 3);
        let c = cone(&rays);
        let dual = dual_cone(&c).map_err(|e| e.to_string())?;
        let back = dual_cone(&dual).map_err(|e| e.to_string())?;
        ensure!(back.dim() == c.dim(), "cone {case}: dimension changed");
        ensure!(back.rays().iter().all(|g| c.contains(g)) && c.rays().iter().all(|g| back.contains(g)), "cone {case}: {rays:?}");
        ensure!(dual.rays().iter().all(|u| rays.iter().all(|r| dot(&small(u), r) >= 0)), "cone {case}: dual pairs negatively");
    }
    let mut checked = 0;
    while checked < 100 {
        let rays = random_rays(&mut rng, 4, 2);
        let c = cone(&rays);
        if !(c.is_strongly_convex() && c.is_full_dimensional()) {
            continue;
        }
        let monoid = hilbert_basis(&c).map_err(|e| e.to_string())?;
        let found: BTreeSet<Vec<i64>> = monoid.hilbert_basis().iter().map(|h| small(h)).collect();
        let (expected, points) = box_irreducibles(&c);
        ensure!(found == expected, "cone {rays:?}: basis {found:?}, enumeration {expected:?}");
        for x in &points {
            let coeffs = monoid.decompose(&big(x)).ok_or_else(|| format!("cone {rays:?}: {x:?} not generated"))?;
            let sum: Vec<BigInt> =
                (0..x.len()).map(|j| coeffs.iter().zip(monoid.hilbert_basis()).map(|(k, h)| k * &h[j]).sum()).collect();
            ensure!(sum == big(x) && coeffs.iter().all(|k| *k >= BigInt::from(0)), "cone {rays:?}: bad decomposition of {x:?}");
        }
        checked += 1;
    }
    Ok("500 Smith forms, 200 double duals, 100 Hilbert bases".into())
}

fn logfan(config: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_logfan"))
        .args(["build-model", "--config", config.to_str().unwrap()])
        .env_remove("LOGFAN_MAX_ORBITS")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{} exited with {:?}", config.display(), out.status.code());
    Ok(out.stdout)
}

fn unimodular(rng: &mut ChaCha8Rng, r: usize) -> IntegerMatrix {
    let mut u = IntegerMatrix::identity(r);
    for _ in 0..6 {
        let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
        match rng.gen_range(0..3) {
            0 => u.swap_cols(i, j),
            1 if i != j => u.add_col_multiple(i, j, &BigInt::from(rng.gen_range(-2..=2))),
            _ => u.negate_col(i),
        }
    }
    u
}

fn invariants(m: &ModelReport) -> (Vec<usize>, Vec<(usize, usize)>, Vec<String>) {
    let mut stabs: Vec<(usize, usize)> = m.orbits.as_ref().unwrap().orbits.iter().map(|o| (o.dim, o.stabilizer.len())).collect();
    stabs.sort();
    let mut verdicts: Vec<String> = m.charts.iter().map(|c| format!("{}:{:?}", c.dim, c.kato.verdict)).collect();
    verdicts.sort();
    (m.dual_complex.as_ref().unwrap().counts(), stabs, verdicts)
}

fn criterion_8(_: &mut Shared) -> Check {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut names: Vec<_> = ["tate3.json", "sign_p2.json", "square_rotation.json", "hexagonal.json", "rank0.json"]
        .iter()
        .map(|n| configs.join(n))
        .collect();
    let dir = std::env::temp_dir().join(format!("logfan-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let copy = dir.join("copy.json");
    std::fs::copy(&names[2], &copy).map_err(|e| e.to_string())?;
    names.push(copy);
    for path in &names {
        ensure!(logfan(path)? == logfan(path)?, "{}: reports differ between runs", path.display());
    }
    ensure!(logfan(&names[2])? == logfan(&names[5])?, "identical configs at different paths give different reports");
    let _ = std::fs::remove_dir_all(&dir);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let forms = random_forms(&mut rng, 20);
    for (i, rows) in forms.iter().enumerate() {
        let r = rows.len();
        let group = if i % 2 == 0 { sign_group(r, 2) } else { GroupAction::trivial(r, 3) };
        let d = degeneration(rows, group).unwrap();
        let u = unimodular(&mut rng, r);
        let e = d.rebase(&u).map_err(|e| e.to_string())?;
        let (a, b) = (invariants(&model(&d)?), invariants(&model(&e)?));
        ensure!(a == b, "b = {rows:?}, u = {u:?}: {a:?} vs {b:?}");
    }
    Ok(format!("{} configs byte-identical, {} rebased instances agree", names.len(), forms.len()))
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut shared = Shared { forms: random_forms(&mut rng, 100), models: Vec::new() };
    let criteria: [(&str, fn(&mut Shared) -> Check); 8] = [
        ("log smoothness of every cone on random data", criterion_1),
        ("multiplication by m fails torsion-freeness", criterion_2),
        ("Tate curves: cycles and node charts", criterion_3),
        ("b = nI: orbit counts, Euler characteristic, square charts", criterion_4),
        ("polarization clauses and perturbation witnesses", criterion_5),
        ("stabilizers and wildness", criterion_6),
        ("Smith form, duality and Hilbert basis oracles", criterion_7),
        ("determinism and basis invariance", criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(|| check(&mut shared))).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{elapsed:.1?}]", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} FAIL  {name}: {why} [{elapsed:.1?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
