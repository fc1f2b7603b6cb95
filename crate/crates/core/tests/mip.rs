mod common;

use std::io::Write;

use common::{fixture, from_pattern, r};
use qbc_core::exact::branch_and_bound;
use qbc_core::mip::{
    add_balance_constraints, add_balance_constraints_with, approx_equal, brute_force_optimum, build_model1,
    build_model2, build_model2_with, emit_lp, emit_lp_with, first_violation, parse_lp, parse_solution,
    run_external_solver, solver_command, verify_assignment, Assignment, BalanceForm, DensityForm,
    EmitOptions, MipInstance, Model1Form, SolverStatus, SOLVER_ENV_VAR,
};
use qbc_core::{BipartiteGraph, Error, Objective, Rational, SearchParams, SizeBounds};

fn lin1(g: &BipartiteGraph, gamma: Rational) -> MipInstance {
    build_model1(g, gamma, &SizeBounds::full(g), Model1Form::Linearized).unwrap()
}

fn set(inst: &MipInstance, values: &mut [f64], name: &str, x: f64) {
    values[inst.var_index(name).unwrap()] = x;
}

#[test]
fn golden_k11_model1_linearized() {
    let g = BipartiteGraph::complete(1, 1);
    let text = emit_lp(&lin1(&g, r(1, 1))).unwrap();
    let golden = std::fs::read_to_string(fixture("golden/k11_model1lin.lp")).unwrap();
    assert_eq!(text, golden);
    assert_eq!(emit_lp(&lin1(&g, r(1, 1))).unwrap(), text);
}

#[test]
fn bilinear_form_needs_the_quadratic_flag() {
    let g = BipartiteGraph::complete(2, 2);
    let inst = build_model1(&g, r(2, 3), &SizeBounds::full(&g), Model1Form::Bilinear).unwrap();
    assert!(matches!(emit_lp(&inst), Err(Error::Unsupported(_))));
    let text = emit_lp_with(
        &inst,
        EmitOptions {
            allow_quadratic: true,
        },
    )
    .unwrap();
    assert!(text.contains("[ - 0.666666666667 z1_1 * z2_1"));
    assert!(approx_equal(&inst, &parse_lp(&text).unwrap(), 1e-11));
}

#[test]
fn lp_round_trip() {
    let toy = from_pattern(3, 3, 0b011_111_111);
    let k23 = BipartiteGraph::complete(2, 3);
    let instances = vec![
        lin1(&toy, r(4, 5)),
        lin1(&k23, r(1, 1)),
        build_model2(&toy, r(4, 5), &SizeBounds::full(&toy)).unwrap(),
        build_model2(&k23, r(2, 3), &SizeBounds::new(1, 2, 2, 3)).unwrap(),
        add_balance_constraints(&lin1(&toy, r(3, 5)), r(1, 3)).unwrap(),
        add_balance_constraints(
            &build_model2(&toy, r(3, 5), &SizeBounds::full(&toy)).unwrap(),
            r(0, 1),
        )
        .unwrap(),
    ];
    for inst in instances {
        let text = emit_lp(&inst).unwrap();
        let back = parse_lp(&text).unwrap();
        assert!(approx_equal(&inst, &back, 1e-11), "{text}");
        assert_eq!(emit_lp(&back).unwrap(), text);
    }
}

#[test]
fn lp_reader_rejects_garbage() {
    assert!(parse_lp("Maximize\n obj: x\nEnd\n").is_err());
    let bad = "\\ qbc model=1lin gamma=1 bounds=1,1,1,1\nMaximize\n obj: x\nSubject To\n c1: x <=\nEnd\n";
    assert!(parse_lp(bad).is_err());
}

#[test]
fn long_constraints_are_wrapped() {
    let g = BipartiteGraph::complete(8, 9);
    let text = emit_lp(&lin1(&g, r(1, 2))).unwrap();
    assert!(text.lines().all(|l| l.len() <= 200));
    assert!(approx_equal(&lin1(&g, r(1, 2)), &parse_lp(&text).unwrap(), 1e-11));
}

fn all_small_graphs() -> impl Iterator<Item = BipartiteGraph> {
    [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)]
        .into_iter()
        .flat_map(|(nu, nv)| (0..1u64 << (nu * nv)).map(move |bits| from_pattern(nu, nv, bits)))
}

/// The emitted linearized Model 1, solved by enumerating all 0/1
/// assignments, has the combinatorial size optimum; its best assignment
/// decodes to a valid selection.
#[test]
fn model1_encoding_matches_combinatorial_optimum() {
    for g in all_small_graphs() {
        for gamma in [r(1, 2), r(2, 3), r(3, 4), r(1, 1)] {
            let inst = lin1(&g, gamma);
            let brute = brute_force_optimum(&inst).unwrap();
            let pool = branch_and_bound(&g, &SearchParams::new(gamma)).unwrap();
            let want = pool.optimum().map(|v| *v.numer() as f64);
            assert_eq!(brute.optimum, want);
            if let Some(best) = brute.best {
                let a = Assignment::from_vec(&inst, &best, brute.optimum);
                let sel = verify_assignment(&g, &inst, &a, gamma).unwrap();
                assert_eq!(sel.size() as f64, brute.optimum.unwrap());
            }
        }
    }
}

/// exp of the Model 2 optimum equals the combinatorial quality optimum.
#[test]
fn model2_encoding_matches_quality_optimum() {
    for g in all_small_graphs() {
        for gamma in [r(1, 2), r(2, 3), r(1, 1)] {
            let pool = branch_and_bound(&g, &SearchParams::new(gamma).objective(Objective::Quality)).unwrap();
            let inst = match build_model2(&g, gamma, &SizeBounds::full(&g)) {
                Ok(inst) => inst,
                Err(Error::Infeasible(_)) => {
                    assert!(pool.is_infeasible());
                    continue;
                }
                Err(e) => panic!("{e}"),
            };
            let brute = brute_force_optimum(&inst).unwrap();
            match (brute.optimum, pool.optimum()) {
                (None, None) => {}
                (Some(f), Some(q)) => {
                    let q = *q.numer() as f64 / *q.denom() as f64;
                    assert!((f.exp() - q).abs() <= 1e-9 * q, "{f} vs {q}");
                    let a = Assignment::from_vec(&inst, brute.best.as_ref().unwrap(), brute.optimum);
                    let sel = verify_assignment(&g, &inst, &a, gamma).unwrap();
                    let got = (sel.edges() * sel.edges()) as f64 / (sel.u_len() * sel.v_len()) as f64;
                    assert!((got - q).abs() <= 1e-9 * q);
                }
                other => panic!("mismatch {other:?}"),
            }
        }
    }
}

/// With the printed density row the left side is 1, so only selections
/// with `n m <= 1/γ` survive: on K_{2,3} at γ = 1/2 the best is a 1x2.
#[test]
fn printed_model2_density_is_too_strong() {
    let g = BipartiteGraph::complete(2, 3);
    let printed = build_model2_with(&g, r(1, 2), &SizeBounds::full(&g), DensityForm::Printed).unwrap();
    let best = brute_force_optimum(&printed).unwrap().optimum.unwrap();
    assert!((best.exp() - 2.0).abs() < 1e-9);
    let corrected = build_model2(&g, r(1, 2), &SizeBounds::full(&g)).unwrap();
    let best = brute_force_optimum(&corrected).unwrap().optimum.unwrap();
    assert!((best.exp() - 6.0).abs() < 1e-9);
}

#[test]
fn balance_constraints() {
    let g = BipartiteGraph::complete(2, 3);
    let base = lin1(&g, r(1, 1));
    let opt = |inst: &MipInstance| brute_force_optimum(inst).unwrap().optimum;
    assert_eq!(opt(&add_balance_constraints(&base, r(0, 1)).unwrap()), Some(4.0));
    assert_eq!(opt(&add_balance_constraints(&base, r(1, 2)).unwrap()), Some(5.0));
    for theta in [r(0, 1), r(1, 4), r(9, 10)] {
        let printed = add_balance_constraints_with(&base, theta, BalanceForm::Printed).unwrap();
        assert_eq!(opt(&printed), Some(5.0));
    }
    assert!(add_balance_constraints(&base, r(1, 1)).is_err());

    // Against the combinatorial balanced search on every graph up to 3x3.
    for g in all_small_graphs() {
        for theta in [r(0, 1), r(1, 2)] {
            let inst = add_balance_constraints(&lin1(&g, r(2, 3)), theta).unwrap();
            let pool = branch_and_bound(&g, &SearchParams::new(r(2, 3)).theta(theta)).unwrap();
            assert_eq!(opt(&inst), pool.optimum().map(|v| *v.numer() as f64));
        }
    }
}

/// The bilinear Model 1 with continuous size indicators, maximised over a
/// grid on the indicator simplices, reaches the combinatorial optimum.
#[test]
fn continuous_z_keeps_the_optimum() {
    let steps = 20;
    for bits in 0..1u64 << 4 {
        let g = from_pattern(2, 2, bits);
        for gamma in [r(1, 2), r(3, 4), r(1, 1)] {
            let inst = build_model1(&g, gamma, &SizeBounds::full(&g), Model1Form::Bilinear).unwrap();
            let binaries = 4 + g.edge_count();
            let mut best: Option<f64> = None;
            let mut values = vec![0.0; inst.variables.len()];
            for mask in 0u32..1 << binaries {
                for (i, x) in values.iter_mut().take(binaries).enumerate() {
                    *x = (mask >> i & 1) as f64;
                }
                for a in 0..=steps {
                    for b in 0..=steps {
                        let (za, zb) = (a as f64 / steps as f64, b as f64 / steps as f64);
                        set(&inst, &mut values, "z1_1", za);
                        set(&inst, &mut values, "z1_2", 1.0 - za);
                        set(&inst, &mut values, "z2_1", zb);
                        set(&inst, &mut values, "z2_2", 1.0 - zb);
                        if first_violation(&inst, &values, true).is_none() {
                            let v = inst.objective_value(&values);
                            best = Some(best.map_or(v, |b: f64| b.max(v)));
                        }
                    }
                }
            }
            let pool = branch_and_bound(&g, &SearchParams::new(gamma)).unwrap();
            assert_eq!(best, pool.optimum().map(|v| *v.numer() as f64), "{bits:b}");
        }
    }
}

/// Fractional pair indicators can fake the density row: half on (1,3) and
/// half on (3,1) reports sizes 2 and 2 but charges only 3 cells.
#[test]
fn pair_indicators_must_be_binary() {
    // U' = {0, 1}, V' = {0, 1} induce 3 of 4 edges.
    let g = BipartiteGraph::from_edges(3, 3, [(0, 0), (0, 1), (1, 0), (2, 2)]).unwrap();
    let inst = lin1(&g, r(1, 1));
    let mut values = vec![0.0; inst.variables.len()];
    for name in ["u_0", "u_1", "v_0", "v_1", "y_0_0", "y_0_1", "y_1_0"] {
        set(&inst, &mut values, name, 1.0);
    }
    set(&inst, &mut values, "z_1_3", 0.5);
    set(&inst, &mut values, "z_3_1", 0.5);
    assert_eq!(first_violation(&inst, &values, false), None);
    assert_eq!(
        first_violation(&inst, &values, true).as_deref(),
        Some("integrality(z_1_3)")
    );
    let sel = g.induced_stats(&[0, 1], &[0, 1]).unwrap();
    assert_eq!(sel.density().unwrap(), r(3, 4));
}

#[test]
fn verify_examples() {
    let g = BipartiteGraph::complete(2, 3);
    let inst = lin1(&g, r(1, 1));
    let mut values = vec![0.0; inst.variables.len()];
    for v in &inst.variables {
        if !v.name.starts_with("z_") {
            set(&inst, &mut values, &v.name.clone(), 1.0);
        }
    }
    set(&inst, &mut values, "z_2_3", 1.0);
    let a = Assignment::from_vec(&inst, &values, Some(5.0));
    let sel = verify_assignment(&g, &inst, &a, r(1, 1)).unwrap();
    assert_eq!((sel.u_len(), sel.v_len()), (2, 3));

    set(&inst, &mut values, "u_0", 0.0);
    let a = Assignment::from_vec(&inst, &values, None);
    match verify_assignment(&g, &inst, &a, r(1, 1)) {
        Err(Error::Verification { constraint, .. }) => assert_eq!(constraint, "link_u_0_0"),
        other => panic!("{other:?}"),
    }

    let mut partial = Assignment::from_vec(&inst, &values, None);
    partial.values.remove("y_1_2");
    assert!(matches!(
        verify_assignment(&g, &inst, &partial, r(1, 1)),
        Err(Error::Verification { .. })
    ));
}

fn k11() -> MipInstance {
    lin1(&BipartiteGraph::complete(1, 1), r(1, 1))
}

const K11_SOLUTION: &str = "objective 2\nu_0 1\nv_0 1\ny_0_0 0.9999999\nz_1_1 1\n";

#[test]
fn solution_files() {
    let inst = k11();
    let a = parse_solution(K11_SOLUTION, &inst).unwrap();
    assert_eq!(a.objective, Some(2.0));
    assert_eq!(a.values["y_0_0"], 1.0);
    let g = BipartiteGraph::complete(1, 1);
    assert_eq!(verify_assignment(&g, &inst, &a, r(1, 1)).unwrap().size(), 2);

    let inf = parse_solution("status infeasible\n", &inst).unwrap();
    assert_eq!(inf.status, SolverStatus::Infeasible);
    assert!(inf.values.is_empty());

    assert!(matches!(
        parse_solution("objective 2\nu_0 1\n", &inst),
        Err(Error::Solver { .. })
    ));
    assert!(matches!(
        parse_solution("u_0 0.5\n", &inst),
        Err(Error::Solver { .. })
    ));
    assert!(matches!(
        parse_solution("q_9 1\n", &inst),
        Err(Error::Solver { .. })
    ));
}

#[test]
fn external_solver_stubs() {
    let inst = k11();
    let echo = format!("printf '{}' > {{sol}}", K11_SOLUTION.replace('\n', "\\n"));
    let a = run_external_solver(&inst, &echo).unwrap();
    assert_eq!(a.objective, Some(2.0));
    assert_eq!(a.status, SolverStatus::Optimal);

    // Without placeholders the paths are appended; the stub checks the LP.
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("stub.sh");
    let mut f = std::fs::File::create(&script).unwrap();
    writeln!(f, "grep -q '^Maximize' \"$1\" || exit 3").unwrap();
    writeln!(f, "echo 'status infeasible' > \"$2\"").unwrap();
    drop(f);
    let a = run_external_solver(&inst, &format!("sh '{}'", script.display())).unwrap();
    assert_eq!(a.status, SolverStatus::Infeasible);

    match run_external_solver(&inst, "echo boom; exit 7") {
        Err(Error::Solver { output, .. }) => assert!(output.contains("boom")),
        other => panic!("{other:?}"),
    }
    let missing = "printf 'objective 2\\nu_0 1\\n' > {sol}";
    assert!(matches!(
        run_external_solver(&inst, missing),
        Err(Error::Solver { .. })
    ));
    assert!(matches!(
        run_external_solver(&inst, "true"),
        Err(Error::Solver { .. })
    ));
}

#[test]
fn solver_command_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qbc.toml");
    std::fs::write(&cfg, "solver_cmd = \"mysolver {lp} {sol}\"\n").unwrap();
    if std::env::var(SOLVER_ENV_VAR).is_err() {
        assert_eq!(
            solver_command(Some(&cfg)).unwrap().as_deref(),
            Some("mysolver {lp} {sol}")
        );
        assert_eq!(solver_command(None).unwrap(), None);
    }
    std::fs::write(&cfg, "solver_cmd = 3\n").unwrap();
    if std::env::var(SOLVER_ENV_VAR).is_err() {
        assert!(matches!(solver_command(Some(&cfg)), Err(Error::Config(_))));
    }
}

#[test]
fn variable_counts_match_the_worst_case_formula() {
    for (nu, nv, bits) in [(2, 3, 0b101_110), (3, 3, 0b011_111_111), (3, 2, 0b11_01_10)] {
        let g = from_pattern(nu, nv, bits);
        let inst = lin1(&g, r(1, 2));
        assert_eq!(inst.variables.len(), nu + nv + g.edge_count() + nu * nv);
    }
}
