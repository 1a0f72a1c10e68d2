use proptest::prelude::*;
use rand::SeedableRng;

use persuade_core::kernel::{
    activation_without_noise, Action, ActivationParams, BufferName, Chunk, ChunkId, Condition,
    DeclarativeMemory, KernelError, KernelRng, KernelState, Production, RetrievalFailure,
    RetrievalRequest, Step, Term, Value,
};

#[derive(Debug, Clone)]
struct Memory {
    bases: Vec<(f64, bool)>,
    sources: usize,
    strengths: Vec<Vec<Option<f64>>>,
    total: f64,
}

fn memory_strategy() -> impl Strategy<Value = Memory> {
    (1usize..=10, 0usize..=4, 0.0f64..4.0).prop_flat_map(|(n, s, total)| {
        (
            prop::collection::vec((-3.0f64..3.0, any::<bool>()), n),
            prop::collection::vec(prop::collection::vec(prop::option::of(-2.0f64..2.0), n), s),
        )
            .prop_map(move |(bases, strengths)| Memory {
                bases,
                sources: s,
                strengths,
                total,
            })
    })
}

fn build(m: &Memory) -> (DeclarativeMemory, ActivationParams, Chunk) {
    let mut params = ActivationParams::new(m.total, 0.0).unwrap();
    let mut dm = DeclarativeMemory::new();
    for (i, (base, wanted)) in m.bases.iter().enumerate() {
        dm.add(
            Chunk::new(format!("c{i}"), "item")
                .unwrap()
                .with_base_activation(*base)
                .unwrap()
                .with_slot("wanted", Value::symbol(if *wanted { "yes" } else { "no" })),
        )
        .unwrap();
    }
    let mut goal = Chunk::new("g", "goal").unwrap();
    for j in 0..m.sources {
        goal.set_slot(format!("s{j}"), Value::chunk(format!("src{j}")));
        for (i, s) in m.strengths[j].iter().enumerate() {
            if let Some(s) = s {
                params
                    .set_association(ChunkId::new(format!("src{j}")), ChunkId::new(format!("c{i}")), *s)
                    .unwrap();
            }
        }
    }
    (dm, params, goal)
}

fn expected_activation(m: &Memory, i: usize) -> f64 {
    let mut a = m.bases[i].0;
    for j in 0..m.sources {
        a += m.total / m.sources as f64 * m.strengths[j][i].unwrap_or(0.0);
    }
    a
}

proptest! {
    #[test]
    fn activation_is_base_plus_weighted_spread(m in memory_strategy()) {
        let (dm, params, goal) = build(&m);
        for (i, chunk) in dm.iter().enumerate() {
            let a = activation_without_noise(chunk, Some(&goal), &params);
            prop_assert!((a - expected_activation(&m, i)).abs() < 1e-9);
        }
    }

    #[test]
    fn retrieval_returns_a_matching_argmax(m in memory_strategy()) {
        let (dm, params, goal) = build(&m);
        let req = RetrievalRequest::new("item").with("wanted", Value::symbol("yes"));
        let got = dm.retrieve(&req, Some(&goal), &params, &mut KernelRng::seed_from_u64(0));
        let best = (0..m.bases.len())
            .filter(|i| m.bases[*i].1)
            .map(|i| expected_activation(&m, i))
            .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |b| b.max(a))));
        match (got, best) {
            (Ok(r), Some(b)) => {
                prop_assert_eq!(r.chunk.slot("wanted"), Some(&Value::symbol("yes")));
                prop_assert!((r.activation - b).abs() < 1e-9);
            }
            (Err(RetrievalFailure::NoMatch), None) => {}
            (g, b) => prop_assert!(false, "kernel {:?}, oracle {:?}", g, b),
        }
    }

    #[test]
    fn noisy_retrieval_replays_with_the_seed(m in memory_strategy(), seed in any::<u64>(), s in 0.01f64..2.0) {
        let (dm, mut params, goal) = build(&m);
        params.set_noise_scale(s).unwrap();
        let req = RetrievalRequest::new("item");
        let a = dm.retrieve(&req, Some(&goal), &params, &mut KernelRng::seed_from_u64(seed)).unwrap();
        let b = dm.retrieve(&req, Some(&goal), &params, &mut KernelRng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a.chunk.id(), b.chunk.id());
        prop_assert_eq!(a.activation, b.activation);
    }

    #[test]
    fn threshold_rejects_weak_winners(base in -3.0f64..3.0, threshold in -3.0f64..3.0) {
        let mut dm = DeclarativeMemory::new();
        dm.add(Chunk::new("only", "item").unwrap().with_base_activation(base).unwrap()).unwrap();
        let mut params = ActivationParams::default();
        params.set_retrieval_threshold(threshold).unwrap();
        let got = dm.retrieve(&RetrievalRequest::new("item"), None, &params, &mut KernelRng::seed_from_u64(1));
        prop_assert_eq!(got.is_ok(), base >= threshold);
    }
}

#[test]
fn equal_activation_goes_to_the_newest_chunk() {
    let mut dm = DeclarativeMemory::new();
    for id in ["old", "mid", "new"] {
        dm.add(Chunk::new(id, "item").unwrap()).unwrap();
    }
    let r = dm
        .retrieve(&RetrievalRequest::new("item"), None, &ActivationParams::default(), &mut KernelRng::seed_from_u64(0))
        .unwrap();
    assert_eq!(r.chunk.id().as_str(), "new");
}

#[test]
fn goal_without_chunk_slots_spreads_nothing() {
    let mut params = ActivationParams::new(1.0, 0.0).unwrap();
    params.set_association(ChunkId::new("x"), ChunkId::new("c"), 5.0).unwrap();
    let c = Chunk::new("c", "item").unwrap().with_base_activation(0.25).unwrap();
    let goal = Chunk::new("g", "goal").unwrap().with_slot("x", Value::symbol("x"));
    assert_eq!(activation_without_noise(&c, Some(&goal), &params), 0.25);
}

fn counter(name: &str, priority: i32, from: &str, to: &str) -> Production {
    Production::new(name, priority)
        .when(Condition::new(BufferName::Goal, "count").is_sym("at", from))
        .then(Action::Modify {
            buffer: BufferName::Goal,
            slots: vec![("at".into(), Term::sym(to))],
        })
}

#[test]
fn highest_priority_fires_and_ties_go_to_the_first_declared() {
    let mut k = KernelState::new(ActivationParams::default(), 0);
    k.add_production(counter("low", 1, "a", "low")).unwrap();
    k.add_production(counter("first", 5, "a", "first")).unwrap();
    k.add_production(counter("second", 5, "a", "second")).unwrap();
    k.set_buffer(BufferName::Goal, Chunk::new("g", "count").unwrap().with_slot("at", Value::symbol("a")));
    match k.step() {
        Step::Fired(f) => assert_eq!(f.production, "first"),
        Step::Quiescent => panic!("nothing fired"),
    }
    assert_eq!(k.buffer(BufferName::Goal).unwrap().slot("at"), Some(&Value::symbol("first")));
    assert!(matches!(k.step(), Step::Quiescent));
}

#[test]
fn retrieval_action_fills_the_retrieval_buffer() {
    let mut k = KernelState::new(ActivationParams::default(), 0);
    k.add_chunk(Chunk::new("fact", "fact").unwrap().with_slot("topic", Value::symbol("mask"))).unwrap();
    k.add_production(
        Production::new("recall", 0)
            .when(Condition::new(BufferName::Goal, "task").bind("topic", "t"))
            .then(Action::Retrieve {
                chunk_type: "fact".into(),
                slots: vec![("topic".into(), Term::var("t"))],
            }),
    )
    .unwrap();
    k.set_buffer(BufferName::Goal, Chunk::new("g", "task").unwrap().with_slot("topic", Value::symbol("mask")));
    let Step::Fired(f) = k.step() else { panic!() };
    assert_eq!(f.retrieval, Some(Ok(ChunkId::new("fact"))));
    assert_eq!(k.buffer(BufferName::Retrieval).unwrap().id().as_str(), "fact");

    k.set_buffer(BufferName::Goal, Chunk::new("g2", "task").unwrap().with_slot("topic", Value::symbol("vaccine")));
    let Step::Fired(f) = k.step() else { panic!() };
    assert_eq!(f.retrieval, Some(Err(RetrievalFailure::NoMatch)));
    assert!(k.buffer(BufferName::Retrieval).is_none());
}

#[test]
fn load_time_validation() {
    let mut k = KernelState::new(ActivationParams::default(), 0);
    let unbound = Production::new("p", 0)
        .when(Condition::new(BufferName::Goal, "g"))
        .then(Action::Modify {
            buffer: BufferName::Goal,
            slots: vec![("x".into(), Term::var("nowhere"))],
        });
    assert!(matches!(k.add_production(unbound), Err(KernelError::UnboundVariable { .. })));

    let two = Production::new("q", 0)
        .when(Condition::new(BufferName::Goal, "g"))
        .then(Action::Retrieve { chunk_type: "a".into(), slots: vec![] })
        .then(Action::Retrieve { chunk_type: "b".into(), slots: vec![] });
    assert!(matches!(k.add_production(two), Err(KernelError::MultipleRetrievals(_))));

    let unmatched = Production::new("r", 0)
        .when(Condition::new(BufferName::Goal, "g"))
        .then(Action::Modify { buffer: BufferName::Imaginal, slots: vec![] });
    assert!(matches!(k.add_production(unmatched), Err(KernelError::UnmatchedModify { .. })));

    k.add_production(counter("ok", 0, "a", "b")).unwrap();
    assert!(matches!(k.add_production(counter("ok", 0, "a", "b")), Err(KernelError::DuplicateProduction(_))));
}

#[test]
fn duplicate_chunk_is_rejected() {
    let mut dm = DeclarativeMemory::new();
    dm.add(Chunk::new("c", "t").unwrap()).unwrap();
    assert!(matches!(dm.add(Chunk::new("c", "t").unwrap()), Err(KernelError::DuplicateChunk(_))));
}
