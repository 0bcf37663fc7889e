use newtonflow::{
    find_all_roots, seed_ladder, trace_flow, SeedOptions, SolveOptions, TraceOptions,
};
use newtonflow_bench::{solve_input, trace_input, SOLVE_DEGREES, TRACE_DEGREES};

#[test]
fn benchmarked_traces_converge() {
    for d in TRACE_DEGREES {
        let p = trace_input(d);
        let trace = trace_flow(
            &p,
            seed_ladder(&p, 0, &SeedOptions::default()),
            &TraceOptions::default(),
        );
        assert!(trace.is_converged(), "degree {d}: {:?}", trace.outcome);
    }
}

#[test]
fn benchmarked_solves_complete() {
    for d in SOLVE_DEGREES {
        let set = find_all_roots(&solve_input(d), &SolveOptions::default()).unwrap();
        assert_eq!(set.total_multiplicity, d);
    }
}
