//! Whole-system exit checks, one per criterion: exact combinatorial
//! counts, the frozen deep-context tables, the symmetry dichotomy,
//! reconstruction round trips, exact metric bounds, and stable figures.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperca_core::ca_engine::product::{product_table, ProductMode, ProductProjection};
use hyperca_core::ca_engine::structure::{
    ground_truth_labeling, structure_alphabet, structure_table,
};
use hyperca_core::ca_engine::synthesis::{
    schedule_labeling, synthesize_propagation_table, SynthesisSchedule,
};
use hyperca_core::ca_engine::{rotate_rule, DefaultPolicy};
use hyperca_core::fib_coords::{fibonacci, level_size, level_start};
use hyperca_core::hedlund::{
    check_commutation, commutation_sweep, GlobalMap, HedlundError, TableGlobalMap,
};
use hyperca_core::metric::{ball_agreement_bound, distance, LevelWeights};
use hyperca_core::render::{closed_vertex_angle_sums, emit_svg, layout, Palette};
use hyperca_core::tiling::{evaluate_word, rotation_about_center, shift_generators, CellAddress};
use hyperca_core::{
    build_ball, step, Alphabet, Automorphism, Configuration, ExtendedStatus, FibTree, GridKind,
    Rule, RuleTable, StateId, TilingBall,
};

const BOTH_GRIDS: [GridKind; 2] = [GridKind::Pentagrid, GridKind::Heptagrid];

/// Expected deep five-neighbour contexts as (own, father-first neighbours).
const FIVE_NEIGHBOUR_ROWS: [(&str, [&str; 5]); 14] = [
    ("Bb", ["Bb", "Wwr", "Bb", "Wb", "Bw"]),
    ("Bb", ["Bw", "Wb", "Bb", "Wb", "Bw"]),
    ("Bb", ["Bw", "Wwr", "Bb", "Wb", "Bw"]),
    ("Bw", ["Wwm", "Bw", "Bb", "Wb", "Bw"]),
    ("Bw", ["Wwr", "Wwm", "Bb", "Wb", "Bw"]),
    ("Bw", ["Wb", "Bb", "Bb", "Wb", "Bw"]),
    ("Wwm", ["Wwm", "Bw", "Wwm", "Wwr", "Bw"]),
    ("Wwm", ["Wwr", "Bw", "Wwm", "Wwr", "Bw"]),
    ("Wwm", ["Wb", "Bw", "Wwm", "Wwr", "Bw"]),
    ("Wwr", ["Wwm", "Bw", "Wwm", "Wwr", "Bb"]),
    ("Wwr", ["Wwr", "Bw", "Wwm", "Wwr", "Bb"]),
    ("Wwr", ["Wb", "Bw", "Wwm", "Wwr", "Bb"]),
    ("Wb", ["Bb", "Bw", "Wwm", "Wwr", "Bb"]),
    ("Wb", ["Bw", "Bw", "Wwm", "Wwr", "Bb"]),
];

/// Expected deep seven-neighbour contexts, same layout.
const SEVEN_NEIGHBOUR_ROWS: [(&str, [&str; 7]); 14] = [
    ("Bb", ["Bb", "Wwr", "Wwr", "Bb", "Wb", "Bw", "Wb"]),
    ("Bb", ["Bw", "Wb", "Wwr", "Bb", "Wb", "Bw", "Wb"]),
    ("Bb", ["Bw", "Wwr", "Wwr", "Bb", "Wb", "Bw", "Wb"]),
    ("Bw", ["Wwm", "Bw", "Wb", "Bb", "Wb", "Bw", "Wwm"]),
    ("Bw", ["Wwr", "Wwm", "Wwr", "Bb", "Wb", "Bw", "Wwm"]),
    ("Bw", ["Wb", "Bb", "Wb", "Bb", "Wb", "Bw", "Wwm"]),
    ("Wwm", ["Wwm", "Bw", "Bw", "Wwm", "Wwr", "Bw", "Wwr"]),
    ("Wwm", ["Wwr", "Bw", "Bw", "Wwm", "Wwr", "Bw", "Wwr"]),
    ("Wwm", ["Wb", "Bw", "Bw", "Wwm", "Wwr", "Bw", "Wwr"]),
    ("Wwr", ["Wwm", "Wwm", "Bw", "Wwm", "Wwr", "Bb", "Bw"]),
    ("Wwr", ["Wwr", "Wwm", "Bw", "Wwm", "Wwr", "Bb", "Bb"]),
    ("Wwr", ["Wb", "Wwm", "Bw", "Wwm", "Wwr", "Bb", "Bb"]),
    ("Wb", ["Bb", "Bb", "Bw", "Wwm", "Wwr", "Bb", "Bw"]),
    ("Wb", ["Bw", "Bb", "Bw", "Wwm", "Wwr", "Bb", "Bw"]),
];

fn within(elapsed: Duration, budget_secs: u64, what: &str) {
    assert!(
        elapsed < Duration::from_secs(budget_secs),
        "{what} took {elapsed:?}, budget {budget_secs} s"
    );
}

fn random_config(ball: &TilingBall, states: usize, rng: &mut ChaCha8Rng) -> Configuration {
    let mut c = Configuration::quiescent(ball);
    for t in ball.tiles() {
        c.set_state(t, StateId(rng.gen_range(0..states) as u8));
    }
    c
}

#[test]
fn criterion_01_tree_level_populations() {
    let start = Instant::now();
    let want = [1u64, 3, 8, 21, 55, 144];
    let tree = FibTree::new(6).unwrap();
    let mut populations = [0u64; 6];
    let mut blacks = [0u64; 6];
    for nu in 1..=tree.node_count() {
        let level = tree.level_of_node(nu).unwrap() as usize;
        if level < 6 {
            populations[level] += 1;
            if tree.status_of(nu).unwrap() == hyperca_core::NodeStatus::Black {
                blacks[level] += 1;
            }
        }
    }
    for n in 0..6 {
        assert_eq!(populations[n], want[n], "population of level {n}");
        assert_eq!(level_size(n as u32).unwrap(), want[n]);
        assert_eq!(
            level_start(n as u32 + 1).unwrap() - level_start(n as u32).unwrap(),
            want[n]
        );
        if n >= 1 {
            // each level splits into two consecutive generation counts
            assert_eq!(blacks[n], fibonacci(2 * n as u32 - 1).unwrap());
            assert_eq!(
                populations[n] - blacks[n],
                fibonacci(2 * n as u32).unwrap()
            );
        }
    }
    within(start.elapsed(), 1, "level populations");
    println!("criterion 1 (tree level populations): PASS");
}

#[test]
fn criterion_02_ring_populations() {
    let start = Instant::now();
    for (grid, want) in [
        (GridKind::Pentagrid, [5usize, 15, 40, 105]),
        (GridKind::Heptagrid, [7, 21, 56, 147]),
    ] {
        let ball = build_ball(grid, 4).unwrap();
        for n in 1..=4u32 {
            assert_eq!(
                ball.ring_cells(n).len(),
                want[n as usize - 1],
                "{grid} ring {n}"
            );
        }
        assert_eq!(ball.tile_count(), 1 + want.iter().sum::<usize>());
    }
    within(start.elapsed(), 1, "ring populations");
    println!("criterion 2 (ring populations): PASS");
}

#[test]
fn criterion_03_addresses_match_the_map() {
    let start = Instant::now();
    let tree = FibTree::new(8).unwrap();
    for grid in BOTH_GRIDS {
        let ball = build_ball(grid, 6).unwrap();
        for t in ball.tiles() {
            let addr = ball.address_of(t).unwrap();
            assert_eq!(ball.tile_at(addr).unwrap(), t, "{grid}: address round trip");
            let CellAddress::Sector { sector, nu } = addr else {
                assert_eq!(t, ball.center());
                continue;
            };
            assert_eq!(ball.sector_of(t).unwrap(), sector);
            // the map's father agrees with the numbering's father
            if nu == 1 {
                assert_eq!(ball.father_of(t), Some(ball.center()), "{grid}: root {t}");
                assert_eq!(
                    ball.extended_status_of(t).unwrap(),
                    ExtendedStatus::RootMark
                );
            } else {
                let father_addr = CellAddress::Sector {
                    sector,
                    nu: tree.father_of(nu).unwrap(),
                };
                let father = ball.father_of(t).expect("non-root tiles have fathers");
                assert_eq!(ball.address_of(father).unwrap(), father_addr, "{grid} {t}");
                assert_eq!(
                    ball.extended_status_of(t).unwrap(),
                    tree.extended_status(nu).unwrap(),
                    "{grid} {t}"
                );
            }
            // every numbered son present in the ball points back at t
            for son in tree.sons_of(nu).unwrap() {
                let son_addr = CellAddress::Sector { sector, nu: son };
                if let Ok(u) = ball.tile_at(son_addr) {
                    assert_eq!(ball.father_of(u), Some(t), "{grid}: son {u} of {t}");
                }
            }
        }
    }
    within(start.elapsed(), 10, "address consistency");
    println!("criterion 3 (addresses match the map): PASS");
}

fn observed_rows(ball: &TilingBall) -> BTreeSet<(String, Vec<String>)> {
    let mut rows = BTreeSet::new();
    for t in ball.tiles() {
        let ring = ball.ring_of(t);
        if ring < 3 || ring + 1 > ball.radius() {
            continue;
        }
        let own = ball.extended_status_of(t).unwrap().name().to_string();
        let neighbors = ball
            .neighbors_ordered(t)
            .unwrap()
            .into_iter()
            .map(|u| ball.extended_status_of(u).unwrap().name().to_string())
            .collect();
        rows.insert((own, neighbors));
    }
    rows
}

fn table_rows(table: &RuleTable) -> BTreeSet<(String, Vec<String>)> {
    let alphabet = table.alphabet();
    table
        .rules_sorted()
        .into_iter()
        .map(|r| {
            (
                alphabet.name(r.own).unwrap().to_string(),
                r.neighbors
                    .iter()
                    .map(|&s| alphabet.name(s).unwrap().to_string())
                    .collect(),
            )
        })
        .collect()
}

fn frozen_rows(rows: &[(&str, Vec<&str>)]) -> BTreeSet<(String, Vec<String>)> {
    rows.iter()
        .map(|(own, nb)| {
            (
                own.to_string(),
                nb.iter().map(|s| s.to_string()).collect(),
            )
        })
        .collect()
}

#[test]
fn criterion_04_deep_context_tables_are_exact() {
    for (grid, frozen) in [
        (
            GridKind::Pentagrid,
            frozen_rows(
                &FIVE_NEIGHBOUR_ROWS
                    .iter()
                    .map(|&(own, ref nb)| (own, nb.to_vec()))
                    .collect::<Vec<_>>(),
            ),
        ),
        (
            GridKind::Heptagrid,
            frozen_rows(
                &SEVEN_NEIGHBOUR_ROWS
                    .iter()
                    .map(|&(own, ref nb)| (own, nb.to_vec()))
                    .collect::<Vec<_>>(),
            ),
        ),
    ] {
        assert_eq!(frozen.len(), 14);
        let ball = build_ball(grid, 8).unwrap();
        let observed = observed_rows(&ball);
        assert_eq!(observed, frozen, "{grid}: observed deep contexts");
        let table = structure_table(grid).unwrap();
        assert_eq!(table_rows(&table), frozen, "{grid}: built-in table rows");
    }
    println!("criterion 4 (deep context tables are exact): PASS");
}

#[test]
fn criterion_05_rotation_closure_is_clean() {
    for grid in BOTH_GRIDS {
        let alpha = grid.alpha() as usize;
        let raw = structure_table(grid).unwrap();
        assert!(!raw.is_rotation_invariant(), "{grid}: raw table");
        let closed = raw.rotation_closure().unwrap();
        assert!(closed.is_rotation_invariant(), "{grid}: closed table");
        assert_eq!(closed.len(), 14 * alpha, "{grid}: closure size");
        let again = closed.rotation_closure().unwrap();
        assert_eq!(again.len(), closed.len(), "{grid}: closure is idempotent");
    }
    // turning a reading frame by one slot shifts every neighbour forward
    let rule = Rule {
        neighbors: [1u8, 4, 1, 5, 2].iter().map(|&s| StateId(s)).collect(),
        own: StateId(1),
        result: StateId(1),
    };
    let turned = rotate_rule(&rule, 1);
    let want: Vec<StateId> = [2u8, 1, 4, 1, 5].iter().map(|&s| StateId(s)).collect();
    assert_eq!(turned.neighbors, want);
    assert_eq!(turned.own, rule.own);
    assert_eq!(turned.result, rule.result);
    let mut back = rule.clone();
    for _ in 0..5 {
        back = rotate_rule(&back, 1);
    }
    assert_eq!(back, rule);
    println!("criterion 5 (rotation closure is clean): PASS");
}

fn lamp_table(grid: GridKind) -> RuleTable {
    // father x lights a dark tile: deliberately frame-sensitive
    let a = Alphabet::new(vec!["q".into(), "x".into()]).unwrap();
    let mut t = RuleTable::new(grid, a, DefaultPolicy::Identity).unwrap();
    let alpha = grid.alpha() as usize;
    let mut nb = vec![StateId(0); alpha];
    nb[0] = StateId(1);
    t.insert(Rule {
        neighbors: nb,
        own: StateId(0),
        result: StateId(1),
    })
    .unwrap();
    t
}

fn copy_father_table(grid: GridKind) -> RuleTable {
    // every tile copies its father: total over two states, frame-sensitive
    let a = Alphabet::new(vec!["q".into(), "x".into()]).unwrap();
    let mut t = RuleTable::new(grid, a, DefaultPolicy::Reject).unwrap();
    let alpha = grid.alpha() as usize;
    for ctx in 0..(1u32 << (alpha + 1)) {
        let nb: Vec<StateId> = (0..alpha).map(|i| StateId(((ctx >> i) & 1) as u8)).collect();
        let own = StateId(((ctx >> alpha) & 1) as u8);
        let result = nb[0];
        t.insert(Rule {
            neighbors: nb,
            own,
            result,
        })
        .unwrap();
    }
    t
}

/// Generator shifts with inverses, `words` random generator words that
/// keep a nonempty comparison region, and every rotation about the centre.
fn automorphism_corpus(
    ball: &TilingBall,
    map: &dyn GlobalMap,
    words: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(String, Automorphism)> {
    let named = shift_generators(ball).unwrap().named();
    let mut corpus: Vec<(String, Automorphism)> = Vec::new();
    for (name, a) in &named {
        corpus.push((name.clone(), a.clone()));
        corpus.push((format!("{name}^-1"), a.invert().unwrap()));
    }
    let probe = Configuration::quiescent(ball);
    let atoms = ["t1", "t1^-1", "t2", "t2^-1"];
    let mut found = 0;
    while found < words {
        let len = rng.gen_range(1..=6);
        let word = (0..len)
            .map(|_| atoms[rng.gen_range(0..atoms.len())])
            .collect::<Vec<_>>()
            .join("*");
        let auto = evaluate_word(ball, &named, &word).unwrap();
        match check_commutation(map, &auto, &probe) {
            Ok(_) => {
                corpus.push((word, auto));
                found += 1;
            }
            Err(HedlundError::EmptyRegion) => continue,
            Err(e) => panic!("probe failed: {e}"),
        }
    }
    for j in 1..ball.p() {
        corpus.push((format!("r{j}"), rotation_about_center(ball, j).unwrap()));
    }
    corpus
}

#[test]
fn criterion_06_commutation_dichotomy() {
    let start = Instant::now();
    let grid = GridKind::Pentagrid;
    let ball = build_ball(grid, 6).unwrap();
    let truth = ground_truth_labeling(&ball).unwrap();
    let structure = structure_table(grid).unwrap();
    let closed = structure.rotation_closure().unwrap();
    let lamp = lamp_table(grid);
    let (invariant_product, proj_inv) =
        product_table(&lamp, &structure, ProductMode::RotationInvariant).unwrap();
    let (dropping_product, proj_drop) =
        product_table(&lamp, &structure, ProductMode::NonInvariant).unwrap();
    let father_reader = copy_father_table(grid);
    // pair tables only answer on a structure-labeled layer, so their
    // trials randomize the base layer over the ground-truth labeling
    let tables: [(&str, &RuleTable, Option<&ProductProjection>, bool); 4] = [
        ("closed status table", &closed, None, true),
        ("paired invariant table", &invariant_product, Some(&proj_inv), true),
        ("paired dropping table", &dropping_product, Some(&proj_drop), false),
        ("father-reading table", &father_reader, None, false),
    ];
    for (i, (label, table, projection, expect_clean)) in tables.into_iter().enumerate() {
        let map = TableGlobalMap::new(&ball, table).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(600 + i as u64);
        let corpus = automorphism_corpus(&ball, &map, 10, &mut rng);
        let configs: Vec<Configuration> = (0..100)
            .map(|_| match projection {
                None => random_config(&ball, table.alphabet().len(), &mut rng),
                Some(proj) => {
                    let base_layer = random_config(&ball, proj.a_len(), &mut rng);
                    proj.embed(&base_layer, &truth).unwrap()
                }
            })
            .collect();
        let outcomes = commutation_sweep(&map, &corpus, &configs).unwrap();
        let failures = outcomes
            .iter()
            .filter(|o| o.counterexample.is_some())
            .count();
        assert_eq!(
            failures == 0,
            expect_clean,
            "{label}: {failures} counterexamples"
        );
        // the sweep verdict must line up with the static table property
        assert_eq!(table.is_rotation_invariant(), failures == 0, "{label}");
    }
    within(start.elapsed(), 120, "commutation dichotomy");
    println!("criterion 6 (commutation dichotomy): PASS");
}

#[test]
fn criterion_07_propagation_reconstruction() {
    for grid in BOTH_GRIDS {
        let train = build_ball(grid, 6).unwrap();
        let table = synthesize_propagation_table(&train, SynthesisSchedule::Staged)
            .expect("synthesis reports no ambiguity");
        let fresh = build_ball(grid, 7).unwrap();
        let mut config = schedule_labeling(&fresh, SynthesisSchedule::Staged, 0).unwrap();
        for _ in 0..5 {
            config = step(&fresh, &table, &config).unwrap();
        }
        assert_eq!(config.valid_radius(), 2, "{grid}");
        let alphabet = table.alphabet();
        let mut compared = 0;
        for t in fresh.tiles() {
            if fresh.ring_of(t) > config.valid_radius() {
                continue;
            }
            let want = match fresh.extended_status_of(t).unwrap() {
                ExtendedStatus::CentralMark => "seed",
                ExtendedStatus::RootMark => "root",
                s => s.name(),
            };
            assert_eq!(
                alphabet.name(config.state(t)).unwrap(),
                want,
                "{grid}: tile {t}"
            );
            compared += 1;
        }
        assert_eq!(
            compared,
            (0..=2u32).map(|n| fresh.ring_cells(n).len()).sum::<usize>(),
            "{grid}"
        );
    }
    println!("criterion 7 (propagation reconstruction): PASS");
}

#[test]
fn criterion_08_extraction_round_trip() {
    let start = Instant::now();
    let grid = GridKind::Pentagrid;
    let closed = structure_table(grid).unwrap().rotation_closure().unwrap();
    let probe_ball = build_ball(grid, 3).unwrap();
    let map = TableGlobalMap::new(&probe_ball, &closed).unwrap();
    let extracted = hyperca_core::hedlund::extract_local_rule(&map).unwrap();
    let states = closed.alphabet().len();
    assert_eq!(
        extracted.len(),
        states.pow(grid.alpha() + 1),
        "extraction answers every reading"
    );
    let big = build_ball(grid, 6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for trial in 0..50 {
        let x = random_config(&big, states, &mut rng);
        let original = step(&big, &closed, &x).unwrap();
        let replayed = step(&big, &extracted, &x).unwrap();
        assert_eq!(original.valid_radius(), replayed.valid_radius());
        assert_eq!(
            original.states(),
            replayed.states(),
            "trial {trial}: the recovered rule diverged"
        );
    }
    within(start.elapsed(), 60, "extraction round trip");
    println!("criterion 8 (extraction round trip): PASS");
}

#[test]
fn criterion_09_projection_commutes() {
    let grid = GridKind::Pentagrid;
    let ball = build_ball(grid, 6).unwrap();
    let base = copy_father_table(grid);
    let structure = structure_table(grid).unwrap();
    let truth = ground_truth_labeling(&ball).unwrap();
    for mode in [ProductMode::RotationInvariant, ProductMode::NonInvariant] {
        let (product, proj) = product_table(&base, &structure, mode).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(909);
        for trial in 0..50 {
            let x = random_config(&ball, 2, &mut rng);
            let direct = step(&ball, &base, &x).unwrap();
            let paired = proj.embed(&x, &truth).unwrap();
            let stepped = step(&ball, &product, &paired).unwrap();
            let projected = proj.project(&stepped);
            let mut compared = 0;
            for t in ball.tiles() {
                let ring = ball.ring_of(t);
                // deep tiles read a conserved structural context; nearer
                // ones fall to the differing defaults of the two tables
                if ring < 3 || ring > stepped.valid_radius() {
                    continue;
                }
                assert_eq!(
                    projected.state(t),
                    direct.state(t),
                    "{mode:?} trial {trial}: tile {t}"
                );
                assert_eq!(
                    proj.p_component(stepped.state(t)),
                    truth.state(t),
                    "{mode:?} trial {trial}: structure layer moved at {t}"
                );
                compared += 1;
            }
            assert!(compared > 0);
        }
    }
    println!("criterion 9 (projection commutes): PASS");
}

#[test]
fn criterion_10_metric_bounds() {
    let ball = build_ball(GridKind::Pentagrid, 7).unwrap();
    let weights = LevelWeights::for_ball(&ball);
    let states = 7;
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for n in 0..=6u32 {
        let loose = BigRational::new(BigInt::one(), BigInt::one() << n as usize);
        let tight = ball_agreement_bound(&ball, n);
        for _ in 0..100 {
            let x = random_config(&ball, states, &mut rng);
            let mut y = x.clone();
            for t in ball.tiles() {
                if ball.ring_of(t) > n {
                    y.set_state(t, StateId(rng.gen_range(0..states) as u8));
                }
            }
            let d = distance(&ball, &weights, &x, &y).unwrap();
            assert!(d <= loose, "agreement through ring {n} gives {d}");
            assert!(d <= tight, "within the exact tail bound at ring {n}");
        }
    }
    let zero = BigRational::new(BigInt::from(0), BigInt::one());
    for _ in 0..100 {
        let x = random_config(&ball, states, &mut rng);
        let y = random_config(&ball, states, &mut rng);
        let z = random_config(&ball, states, &mut rng);
        let dxy = distance(&ball, &weights, &x, &y).unwrap();
        let dyx = distance(&ball, &weights, &y, &x).unwrap();
        let dyz = distance(&ball, &weights, &y, &z).unwrap();
        let dxz = distance(&ball, &weights, &x, &z).unwrap();
        assert_eq!(dxy, dyx);
        assert!(dxy >= zero);
        assert!(dxz <= dxy.clone() + dyz);
        assert_eq!(distance(&ball, &weights, &x, &x).unwrap(), zero);
        assert_eq!(dxy == zero, x.states() == y.states());
    }
    println!("criterion 10 (metric bounds): PASS");
}

#[test]
fn criterion_11_render_sanity() {
    let ball = build_ball(GridKind::Pentagrid, 4).unwrap();
    assert_eq!(ball.tile_count(), 166);
    let l = layout(&ball).unwrap();
    let sums = closed_vertex_angle_sums(&ball, &l);
    assert!(!sums.is_empty());
    for total in sums {
        assert!(
            (total - 2.0 * std::f64::consts::PI).abs() < 1e-6,
            "angle sum {total}"
        );
    }
    let truth = ground_truth_labeling(&ball).unwrap();
    let alphabet = structure_alphabet();
    let palette = Palette::default_structure();
    let svg = emit_svg(&ball, &l, &truth, &alphabet, &palette).unwrap();
    let again = emit_svg(&ball, &l, &truth, &alphabet, &palette).unwrap();
    assert_eq!(svg, again, "byte-stable output");
    assert_eq!(svg.matches("<path ").count(), 166);
    println!("criterion 11 (render sanity): PASS");
}
