//! Runs every acceptance criterion at its pinned size and tolerance and
//! prints one line per criterion. Exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{bumps_and_deaths, cone_diagram, equal_diagram_pair, sample};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reeb_edit::distance::{deletion_eps_bound, upper_bound_canonical};
use reeb_edit::enumerate::enumerate_applicable;
use reeb_edit::{
    bottleneck, bottleneck_oracle, canonicalize, connect, distance_report, extended_diagram, rewrite_deletions,
    stability_experiment, DeformationSequence, EditOp, Label, OpKind, PersistenceDiagram, ReebGraph, SearchParams,
};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn quick() -> SearchParams {
    SearchParams {
        beam_width: 6,
        max_depth: 2,
        ..SearchParams::default()
    }
}

fn op_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut per_kind = [0usize; 6];
    let mut total = 0;
    let mut seed = 0u64;
    while total < 1200 || per_kind.iter().any(|&c| c < 20) {
        let g = sample((seed % 4) as usize, (seed % 5) as usize, seed);
        seed += 1;
        let eps = g.min_label_gap().unwrap() / Label::from_int(8);
        let ops = enumerate_applicable(&g, &OpKind::ALL, &eps);
        let mut picked: Vec<&EditOp> = ops.choose_multiple(&mut rng, 4).collect();
        // keep rare kinds represented
        for kind in [OpKind::D, OpKind::K1, OpKind::K2, OpKind::K3] {
            if let Some(op) = ops
                .iter()
                .filter(|o| o.kind() == kind)
                .collect::<Vec<_>>()
                .choose(&mut rng)
            {
                picked.push(op);
            }
        }
        for op in picked {
            let ctx = || format!("seed {}: {op:?}", seed - 1);
            let (h, c) = op.apply_with_cost(&g).map_err(|e| format!("{}: {e}", ctx()))?;
            ensure(h.validate().ok, || format!("{}: result invalid", ctx()))?;
            ensure(h.genus().unwrap() == g.genus().unwrap(), || {
                format!("{}: genus changed", ctx())
            })?;
            let inv = op.inverse(&g, &h).map_err(|e| format!("{}: {e}", ctx()))?;
            let (back, c_inv) = inv.apply_with_cost(&h).map_err(|e| format!("{}: {e}", ctx()))?;
            ensure(back.is_isomorphic_to(&g), || format!("{}: round trip differs", ctx()))?;
            ensure(c == c_inv, || format!("{}: cost {c} vs inverse {c_inv}", ctx()))?;
            let k = OpKind::ALL.iter().position(|x| *x == op.kind()).unwrap();
            per_kind[k] += 1;
            total += 1;
        }
    }
    Ok(format!(
        "{total} (graph, op) pairs; per kind B/D/R/K1/K2/K3 = {per_kind:?}"
    ))
}

fn canonical_form() -> Outcome {
    let mut count = 0;
    let mut longest = 0;
    for seed in 0..240u64 {
        let genus = (seed % 5) as usize;
        let pairs = (seed / 5 % 7) as usize;
        let g = sample(genus, pairs, 1000 + seed);
        let res = canonicalize(&g).map_err(|e| format!("seed {seed}: {e}"))?;
        let c = &res.canonical_graph;
        ensure(c.is_canonical().unwrap(), || format!("seed {seed}: not canonical"))?;
        ensure(c.leaf_counts() == (1, 1), || {
            format!("seed {seed}: leaves {:?}", c.leaf_counts())
        })?;
        ensure(c.vertex_count() == 2 * genus + 2, || {
            format!("seed {seed}: |V| = {}", c.vertex_count())
        })?;
        ensure(res.cycle_rounds <= genus, || {
            format!("seed {seed}: {} rounds", res.cycle_rounds)
        })?;
        let replayed = res.sequence.replay(&g).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(&replayed == c, || format!("seed {seed}: replay differs"))?;
        longest = longest.max(res.sequence.len());
        count += 1;
    }
    Ok(format!(
        "{count} graphs, genus 0..4, up to 6 leaf pairs; longest witness {longest} ops"
    ))
}

fn connectivity() -> Outcome {
    let mut count = 0;
    for seed in 0..120u64 {
        let genus = (seed % 5) as usize;
        let g1 = sample(genus, (seed % 4) as usize, 2000 + seed);
        let g2 = sample(genus, (seed / 4 % 4) as usize, 3000 + seed);
        let seq = connect(&g1, &g2).map_err(|e| format!("seed {seed}: {e}"))?;
        let end = seq.replay(&g1).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(end.is_isomorphic_to(&g2), || format!("seed {seed}: end not isomorphic"))?;
        count += 1;
    }
    Ok(format!("{count} same-genus pairs connected"))
}

fn three_bumps() -> ReebGraph {
    ReebGraph::from_lists(
        &[
            ("m", "0"),
            ("p1", "1"),
            ("q1", "3"),
            ("p2", "4"),
            ("q2", "6"),
            ("p3", "7"),
            ("q3", "9"),
            ("M", "10"),
        ],
        &[
            ("m", "q1"),
            ("p1", "q1"),
            ("q1", "q2"),
            ("p2", "q2"),
            ("q2", "q3"),
            ("p3", "q3"),
            ("q3", "M"),
        ],
    )
    .unwrap()
}

fn deletion_rewrite() -> Outcome {
    let mut count = 0;
    for seed in 0..120u64 {
        let n = 1 + (seed % 6) as usize;
        let (g, deaths) = bumps_and_deaths((seed % 3) as usize, n, 4000 + seed);
        let eps = deletion_eps_bound(&g, &deaths).map_err(|e| e.to_string())? / Label::from_int(3);
        let mut cur = g.clone();
        let mut max = Label::zero();
        for op in &deaths {
            let (next, c) = op.apply_with_cost(&cur).unwrap();
            max = max.max(c);
            cur = next;
        }
        let s = rewrite_deletions(&g, &deaths, &eps).map_err(|e| format!("seed {seed}: {e}"))?;
        let cost = s.total_cost(&g).map_err(|e| format!("seed {seed}: {e}"))?;
        let hi = &max + &(&eps * &Label::from_int(n as i64 - 1));
        ensure(&max - &eps <= cost && cost <= hi, || {
            format!("seed {seed}: cost {cost} outside [{}, {hi}]", &max - &eps)
        })?;
        count += 1;
    }
    let g = three_bumps();
    let deaths: Vec<EditOp> = (1..=3)
        .map(|i| EditOp::Death {
            u1: format!("q{i}").as_str().into(),
            u2: format!("p{i}").as_str().into(),
        })
        .collect();
    let naive = DeformationSequence::new(deaths.clone()).total_cost(&g).unwrap();
    let rewritten = rewrite_deletions(&g, &deaths, &Label::ratio(1, 100))
        .unwrap()
        .total_cost(&g)
        .unwrap();
    ensure(naive == Label::from_int(3), || format!("naive cost {naive}"))?;
    ensure(rewritten <= Label::ratio(102, 100), || {
        format!("rewritten cost {rewritten}")
    })?;
    Ok(format!(
        "{count} random death sequences within bounds; bumps instance {rewritten} vs naive {naive}"
    ))
}

fn stability() -> Outcome {
    let mut lines = Vec::new();
    for genus in 0..4usize {
        let g = sample(genus, genus % 3, 5000 + genus as u64);
        let delta = g.min_label_gap().unwrap() / Label::from_int(100);
        let table = stability_experiment(&g, &delta, 100, 77, &quick()).map_err(|e| e.to_string())?;
        ensure(table.passed() == 100, || {
            format!("genus {genus}: {}/100 passed", table.passed())
        })?;
        lines.push(format!("genus {genus}: 100/100"));
    }
    Ok(format!("upper <= delta = min gap / 100; {}", lines.join(", ")))
}

fn random_diagram(rng: &mut ChaCha8Rng, ess1: usize) -> PersistenceDiagram {
    let pt = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0..60i64);
        let w = rng.gen_range(1..30i64);
        (Label::ratio(a, 4), Label::ratio(a + w, 4))
    };
    let n0 = rng.gen_range(0..=7);
    let n1 = rng.gen_range(0..=7);
    let mut d = PersistenceDiagram {
        ord0: (0..n0).map(|_| pt(rng)).collect(),
        rel_ord0_neg: (0..n1).map(|_| pt(rng)).map(|(a, b)| (b, a)).collect(),
        ess0: pt(rng),
        ess1: (0..ess1).map(|_| pt(rng)).map(|(a, b)| (b, a)).collect(),
    };
    d.ord0.sort();
    d.rel_ord0_neg.sort();
    d.ess1.sort();
    d
}

fn bottleneck_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut pairs = 0;
    for i in 0..520 {
        let k = rng.gen_range(0..=5);
        let a = random_diagram(&mut rng, k);
        // an occasional cardinality mismatch exercises the infinite case
        let b = random_diagram(&mut rng, if i % 50 == 0 { k + 1 } else { k });
        let fast = bottleneck(&a, &b);
        let slow = bottleneck_oracle(&a, &b).map_err(|e| e.to_string())?;
        ensure(fast.value == slow.value && fast.per_kind == slow.per_kind, || {
            format!("pair {i}: {:?} vs {:?}", fast.value, slow.value)
        })?;
        pairs += 1;
    }
    let mut graphs = 0;
    let mut seed = 6000u64;
    while graphs < 120 {
        let g = sample((seed % 3) as usize, (seed % 4) as usize, seed);
        seed += 1;
        if g.vertex_count() > 10 {
            continue;
        }
        let sweep = extended_diagram(&g).unwrap();
        ensure(sweep == cone_diagram(&g), || {
            format!("seed {}: diagrams differ", seed - 1)
        })?;
        graphs += 1;
    }
    Ok(format!(
        "{pairs} diagram pairs match the oracle; {graphs} graphs (<= 10 vertices) match boundary reduction"
    ))
}

fn genus_two(j1: &str, j2: &str) -> ReebGraph {
    ReebGraph::from_lists(
        &[
            ("m", "0"),
            ("s1", "1"),
            ("j1", j1),
            ("s2", "4"),
            ("j2", j2),
            ("M", "10"),
        ],
        &[
            ("m", "s1"),
            ("s1", "j1"),
            ("s1", "j1"),
            ("j1", "s2"),
            ("s2", "j2"),
            ("s2", "j2"),
            ("j2", "M"),
        ],
    )
    .unwrap()
}

fn sandwich() -> Outcome {
    let mut count = 0;
    for seed in 0..60u64 {
        let genus = (seed % 4) as usize;
        let g1 = sample(genus, (seed % 3) as usize, 7000 + seed);
        let g2 = sample(genus, (seed / 3 % 3) as usize, 8000 + seed);
        let r = distance_report(&g1, &g2, &quick()).map_err(|e| format!("seed {seed}: {e}"))?;
        let upper = r.upper.unwrap();
        ensure(r.lower <= upper, || format!("seed {seed}: {} > {upper}", r.lower))?;
        count += 1;
    }
    let a = Label::from_int(1);
    let r = distance_report(&genus_two("2", "5"), &genus_two("3", "6"), &quick()).map_err(|e| e.to_string())?;
    ensure(r.lower == a && r.upper.as_ref() == Some(&a), || {
        format!("shifted cycles: lower {} upper {:?}", r.lower, r.upper)
    })?;
    let (x, y) = equal_diagram_pair();
    ensure(extended_diagram(&x).unwrap() == extended_diagram(&y).unwrap(), || {
        "diagrams differ".into()
    })?;
    ensure(!x.is_isomorphic_to(&y), || "pair is isomorphic".into())?;
    let r2 = distance_report(&x, &y, &quick()).map_err(|e| e.to_string())?;
    let up2 = r2.upper.unwrap();
    ensure(r2.lower.is_zero() && up2 > Label::zero(), || {
        format!("equal diagrams: lower {} upper {up2}", r2.lower)
    })?;
    Ok(format!(
        "{count} random pairs with lower <= upper; shifted cycles lower = upper = {a}; equal-diagram pair lower 0 < upper {up2}"
    ))
}

fn metric_axioms() -> Outcome {
    for seed in 0..50u64 {
        let g = sample((seed % 5) as usize, (seed % 4) as usize, 9000 + seed);
        let r = distance_report(&g, &g, &quick()).map_err(|e| e.to_string())?;
        ensure(
            r.lower.is_zero() && r.upper.as_ref().is_some_and(Label::is_zero),
            || format!("seed {seed}: self report {} / {:?}", r.lower, r.upper),
        )?;
    }
    for seed in 0..50u64 {
        let genus = (seed % 4) as usize;
        let g1 = sample(genus, (seed % 4) as usize, 9500 + seed);
        let g2 = sample(genus, (seed / 4 % 4) as usize, 9700 + seed);
        let fwd = upper_bound_canonical(&g1, &g2, None).map_err(|e| e.to_string())?;
        let back = upper_bound_canonical(&g2, &g1, None).map_err(|e| e.to_string())?;
        ensure(fwd.cost == back.cost, || {
            format!("seed {seed}: {} vs {}", fwd.cost, back.cost)
        })?;
    }
    Ok("50 self reports are 0; 50 canonical upper bounds symmetric exactly".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (2, "operation soundness", op_soundness),
        (3, "canonical form", canonical_form),
        (4, "connectivity", connectivity),
        (5, "deletion rewriting bound", deletion_rewrite),
        (6, "stability", stability),
        (7, "bottleneck correctness", bottleneck_correctness),
        (8, "sandwich and tightness", sandwich),
        (9, "pseudo-metric axioms", metric_axioms),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
