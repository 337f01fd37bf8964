use hatlab_core::exact::rational::rational_from_ratio as q;
use hatlab_core::game::win_probability;
use hatlab_core::search::{run_search, CheckpointOptions, SearchConfig, SearchMode};
use hatlab_core::HatError;

fn with_workers(mut cfg: SearchConfig, workers: usize) -> SearchConfig {
    cfg.workers = workers;
    cfg
}

#[test]
fn exhaustive_is_worker_invariant() {
    for symmetric in [false, true] {
        let base = SearchConfig::exhaustive(2, q(1, 3), symmetric);
        let reference = run_search(&base).unwrap();
        for w in [2, 8] {
            assert_eq!(
                run_search(&with_workers(base.clone(), w)).unwrap(),
                reference
            );
        }
    }
    let base = SearchConfig::exhaustive(3, q(1, 2), true);
    let reference = run_search(&base).unwrap();
    for w in [2, 8] {
        assert_eq!(
            run_search(&with_workers(base.clone(), w)).unwrap(),
            reference
        );
    }
}

#[test]
fn hill_climb_is_worker_invariant() {
    let base = SearchConfig::hill_climb(4, q(1, 2), 9, 12);
    let reference = run_search(&base).unwrap();
    assert_eq!(reference.converged_restarts, Some(12));
    for w in [2, 8] {
        assert_eq!(
            run_search(&with_workers(base.clone(), w)).unwrap(),
            reference
        );
    }
    for witness in &reference.witnesses {
        assert_eq!(
            win_probability(witness, &q(1, 2)).unwrap(),
            reference.best_value
        );
    }
}

fn resume_matches(cfg: SearchConfig, interval: u64, stop: u64) {
    let plain = run_search(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut opts = CheckpointOptions::new(dir.path().join("ck.json"));
    opts.interval = interval;
    opts.stop_after = Some(stop);
    let mut split = cfg.clone();
    split.checkpoint = Some(opts.clone());
    match run_search(&split) {
        Err(HatError::Interrupted { cursor }) => assert!(cursor >= stop),
        other => panic!("expected an interruption, got {other:?}"),
    }
    assert!(dir.path().join("ck.json").exists());
    opts.stop_after = None;
    split.checkpoint = Some(opts);
    // a different worker count must not invalidate the checkpoint
    split.workers = 3;
    assert_eq!(run_search(&split).unwrap(), plain);
}

#[test]
fn exhaustive_resume_equals_uninterrupted() {
    resume_matches(SearchConfig::exhaustive(3, q(1, 2), true), 100, 300);
    resume_matches(SearchConfig::exhaustive(2, q(2, 5), false), 3, 6);
}

#[test]
fn hill_climb_resume_equals_uninterrupted() {
    resume_matches(SearchConfig::hill_climb(4, q(1, 2), 3, 10), 3, 4);
}

#[test]
fn checkpoint_from_other_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    let mut opts = CheckpointOptions::new(&path);
    opts.interval = 50;
    opts.stop_after = Some(50);
    let mut cfg = SearchConfig::exhaustive(3, q(1, 2), true);
    cfg.checkpoint = Some(opts.clone());
    assert!(matches!(
        run_search(&cfg),
        Err(HatError::Interrupted { .. })
    ));
    let mut other = SearchConfig::exhaustive(3, q(1, 3), true);
    opts.stop_after = None;
    other.checkpoint = Some(opts);
    assert!(matches!(
        run_search(&other),
        Err(HatError::CheckpointMismatch { .. })
    ));
}

#[test]
fn large_spaces_are_refused() {
    let cfg = SearchConfig::exhaustive(4, q(1, 2), false);
    assert!(matches!(
        run_search(&cfg),
        Err(HatError::SearchSpaceTooLarge { .. })
    ));
    let cfg = SearchConfig::exhaustive(4, q(1, 2), true);
    assert!(matches!(
        run_search(&cfg),
        Err(HatError::CheckpointRequired(_))
    ));
    let mut cfg = SearchConfig::hill_climb(3, q(1, 2), 0, 1);
    cfg.mode = SearchMode::HillClimb;
    cfg.restarts = 0;
    assert!(run_search(&cfg).is_err());
}
