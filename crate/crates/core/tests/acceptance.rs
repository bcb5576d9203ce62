//! Acceptance battery: one test per shipped guarantee, each printing a
//! single PASS/FAIL line (run with `--nocapture` to see them on success).
//! Every check is against an independent oracle or a restated bound; no
//! tolerances are applied silently.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use blz::engine::FactorAudit;
use blz::oracle::{assert_greedy, lz_oracle, naive_suffix_structures, RefTok};
use blz::order::{KIND_CLOSE, KIND_LEAF, KIND_OPEN};
use blz::suffix::SuffixTree;
use blz::wavelet::WaveletTree;
use blz::{Code, Engine, Factor, FactorKind, FactorSink, Params, SliceSource, Stats};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run_engine(
    text: &[Code],
    sigma: u32,
    r: Option<usize>,
) -> (Vec<Factor>, Stats, Vec<FactorAudit>) {
    let params = match r {
        Some(r) => Params::with_block_size(text.len(), sigma, r).unwrap(),
        None => Params::choose(text.len(), sigma).unwrap(),
    };
    let mut engine = Engine::new(params, SliceSource::new(text, sigma));
    let mut factors: Vec<Factor> = Vec::new();
    let stats = engine.run(&mut factors).unwrap();
    (factors, stats, engine.audits().to_vec())
}

fn parse_of(factors: &[Factor]) -> Vec<(usize, usize, FactorKind)> {
    factors.iter().map(|f| (f.start, f.len, f.kind)).collect()
}

/// Engine output vs the quadratic leftmost-witness scan, compared on
/// (start, len, kind); witnesses are additionally validated in place.
fn diverges(text: &[Code], sigma: u32, r: Option<usize>) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        let (got, _, _) = run_engine(text, sigma, r);
        let want = lz_oracle(text);
        if parse_of(&got) != parse_of(&want) {
            return true;
        }
        assert_greedy(text, &got);
        false
    }));
    outcome.unwrap_or(true)
}

fn decode_base(mut id: u64, sigma: u32, n: usize, out: &mut Vec<Code>) {
    out.clear();
    for _ in 0..n {
        out.push((id % sigma as u64) as Code);
        id /= sigma as u64;
    }
}

fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: u32) -> Vec<Code> {
    (0..n).map(|_| rng.gen_range(0..sigma)).collect()
}

fn fibonacci_word(n: usize) -> Vec<Code> {
    let mut a: Vec<Code> = vec![0];
    let mut b: Vec<Code> = vec![0, 1];
    while b.len() < n {
        let next = [b.as_slice(), a.as_slice()].concat();
        a = std::mem::replace(&mut b, next);
    }
    b.truncate(n);
    b
}

fn thue_morse(n: usize) -> Vec<Code> {
    (0..n).map(|i| (i as u64).count_ones() as Code & 1).collect()
}

fn alternating(n: usize) -> Vec<Code> {
    (0..n).map(|i| (i % 2) as Code).collect()
}

fn structured_corpus() -> Vec<(&'static str, Vec<Code>, u32)> {
    vec![
        ("fibonacci-10k", fibonacci_word(10_000), 2),
        ("thue-morse-8k", thue_morse(8192), 2),
        ("single-run-10k", vec![0; 10_000], 2),
        ("two-period-10k", alternating(10_000), 2),
    ]
}

#[test]
fn criterion_1_exhaustive_oracle_equivalence() {
    let mut bad = 0usize;
    let mut runs = 0usize;
    let mut first_bad = None;
    let mut text = Vec::new();
    for (sigma, max_n) in [(2u32, 14usize), (3, 9)] {
        for n in 1..=max_n {
            for id in 0..(sigma as u64).pow(n as u32) {
                decode_base(id, sigma, n, &mut text);
                for r in [1usize, 2, 3] {
                    runs += 1;
                    if diverges(&text, sigma, Some(r)) {
                        bad += 1;
                        first_bad.get_or_insert((text.clone(), sigma, r));
                    }
                }
            }
        }
    }
    if let Some((t, sigma, r)) = &first_bad {
        eprintln!("first divergence: sigma={sigma} r={r} text={t:?}");
    }
    println!(
        "criterion 1 (exhaustive oracle equivalence): {} [{} runs, {} divergences]",
        if bad == 0 { "PASS" } else { "FAIL" },
        runs,
        bad
    );
    assert_eq!(bad, 0);
}

#[test]
fn criterion_2_randomized_and_structured_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0be5_1ead);
    let mut bad = 0usize;
    let mut runs = 0usize;
    for i in 0..10_000usize {
        let sigma = [2u32, 3, 4, 16, 26][i % 5];
        let n = rng.gen_range(1..=512usize);
        let text = random_text(&mut rng, n, sigma);
        runs += 1;
        if diverges(&text, sigma, None) {
            bad += 1;
        }
    }
    for (name, text, sigma) in structured_corpus() {
        runs += 1;
        if diverges(&text, sigma, None) {
            bad += 1;
            eprintln!("structured divergence: {name}");
        }
    }
    println!(
        "criterion 2 (randomized + structured oracle equivalence): {} [{} runs, {} divergences]",
        if bad == 0 { "PASS" } else { "FAIL" },
        runs,
        bad
    );
    assert_eq!(bad, 0);
}

/// Shared battery for the per-factor cost bounds: every run's block size and
/// per-factor counters.
fn budget_battery() -> &'static Vec<(usize, Vec<FactorAudit>)> {
    static BATTERY: OnceLock<Vec<(usize, Vec<FactorAudit>)>> = OnceLock::new();
    BATTERY.get_or_init(|| {
        let mut out = Vec::new();
        let mut text = Vec::new();
        for n in 1..=12usize {
            for id in 0..(1u64 << n) {
                decode_base(id, 2, n, &mut text);
                for r in [1usize, 2, 3] {
                    let (_, stats, audits) = run_engine(&text, 2, Some(r));
                    out.push((stats.r, audits));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0xb0d9_e7);
        for i in 0..3000usize {
            let sigma = [2u32, 3, 4, 16, 26][i % 5];
            let n = rng.gen_range(1..=512usize);
            let text = random_text(&mut rng, n, sigma);
            let (_, stats, audits) = run_engine(&text, sigma, None);
            out.push((stats.r, audits));
        }
        for (_, text, sigma) in structured_corpus() {
            let (_, stats, audits) = run_engine(&text, sigma, None);
            out.push((stats.r, audits));
        }
        out
    })
}

#[test]
fn criterion_3_first_step_read_budget() {
    let mut factors = 0usize;
    let mut violations = 0usize;
    for (r, audits) in budget_battery() {
        for a in audits {
            factors += 1;
            if a.first_step_chars > a.len + r {
                violations += 1;
            }
        }
    }
    println!(
        "criterion 3 (first-step reads per factor <= len + r): {} [{} factors, {} violations]",
        if violations == 0 { "PASS" } else { "FAIL" },
        factors,
        violations
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_4_occurrence_query_budget() {
    let mut factors = 0usize;
    let mut violations = 0usize;
    for (r, audits) in budget_battery() {
        for a in audits {
            factors += 1;
            if a.exist_calls > a.len + r {
                violations += 1;
            }
        }
    }
    println!(
        "criterion 4 (occurrence queries per factor <= len + r): {} [{} factors, {} violations]",
        if violations == 0 { "PASS" } else { "FAIL" },
        factors,
        violations
    );
    assert_eq!(violations, 0);
}

fn check_bitvec_mirror(ops: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live = blz::bits::DynBitVec::new();
    let mut mirror: Vec<bool> = Vec::new();
    let mut bad = 0usize;
    for _ in 0..ops {
        if mirror.is_empty() || rng.gen_bool(0.6) {
            let pos = rng.gen_range(0..=mirror.len());
            let bit = rng.gen_bool(0.5);
            live.insert(pos, bit);
            mirror.insert(pos, bit);
        } else {
            let i = rng.gen_range(0..mirror.len());
            if live.access(i + 1) != mirror[i] {
                bad += 1;
            }
            let p = rng.gen_range(0..=mirror.len());
            let bit = rng.gen_bool(0.5);
            let want = mirror[..p].iter().filter(|&&b| b == bit).count();
            if live.rank(p, bit) != want {
                bad += 1;
            }
            let all = mirror.iter().filter(|&&b| b == bit).count();
            if all > 0 {
                let j = rng.gen_range(1..=all);
                let want_pos = mirror
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b == bit)
                    .nth(j - 1)
                    .unwrap()
                    .0
                    + 1;
                if live.select(j, bit) != want_pos {
                    bad += 1;
                }
            }
        }
    }
    bad
}

fn check_wavelet_mirror(ops: usize, seed: u64) -> usize {
    const MAXV: u64 = 4095; // 12-bit values
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live = WaveletTree::new(MAXV);
    let mut mirror: Vec<u64> = Vec::new();
    let mut bad = 0usize;
    for _ in 0..ops {
        if mirror.is_empty() || rng.gen_bool(0.7) {
            let pos = rng.gen_range(0..=mirror.len());
            let val = rng.gen_range(0..=MAXV);
            live.insert(pos, val);
            mirror.insert(pos, val);
        } else {
            let i = rng.gen_range(0..mirror.len());
            if live.access(i + 1) != mirror[i] {
                bad += 1;
            }
            let p1 = rng.gen_range(1..=mirror.len());
            let p2 = rng.gen_range(p1..=mirror.len());
            let a = rng.gen_range(0..=MAXV);
            let b = rng.gen_range(0..=MAXV);
            let (vlo, vhi) = (a.min(b), a.max(b));
            let limit = rng.gen_range(1..=4usize);
            let matches: Vec<usize> = (p1..=p2)
                .filter(|&k| (vlo..=vhi).contains(&mirror[k - 1]))
                .collect();
            let want: Vec<usize> = if matches.len() < limit {
                matches.clone()
            } else {
                let mut w = matches[..limit - 1].to_vec();
                w.push(*matches.last().unwrap());
                w
            };
            let (got, _) = live.range_candidates(p1, p2, vlo, vhi, limit);
            if got != want {
                bad += 1;
            }
        }
    }
    bad
}

/// Rebuilds the expected traversal, rank spans, borders and keys for the
/// block string from scratch and compares them with the live tree.
fn order_index_matches_dfs(st: &SuffixTree, blocks: &[u64], r: usize, w: u32) -> bool {
    let reference = naive_suffix_structures(blocks, r, w);
    let live = st.traversal();
    let live_toks: Vec<RefTok> = live
        .iter()
        .map(|&(kind, v)| match kind {
            KIND_OPEN => RefTok::Open,
            KIND_CLOSE => RefTok::Close,
            KIND_LEAF => RefTok::Leaf(st.suffix_block(v)),
            _ => unreachable!("traversal entries are open/close/leaf"),
        })
        .collect();
    if live_toks != reference.tokens {
        return false;
    }
    // Rank spans per internal vertex, recomputed by scanning the traversal.
    let mut leaf_no = 0usize;
    let mut stack: Vec<(u32, usize)> = Vec::new();
    for &(kind, v) in &live {
        match kind {
            KIND_OPEN => stack.push((v, leaf_no + 1)),
            KIND_LEAF => {
                leaf_no += 1;
                if st.rank_span_vertex(v) != (leaf_no, leaf_no) {
                    return false;
                }
            }
            KIND_CLOSE => {
                let (u, lo) = stack.pop().unwrap();
                if u != v || st.rank_span_vertex(v) != (lo, leaf_no) {
                    return false;
                }
            }
            _ => unreachable!(),
        }
    }
    let entries = st.leaf_entries(1, st.leaf_count());
    let live_borders: Vec<usize> = entries.iter().map(|&(b, _)| b).collect();
    if live_borders != reference.borders {
        return false;
    }
    (1..=st.leaf_count()).all(|k| st.leaf_key_at_rank(k) == reference.keys[k - 1])
}

/// Builds the tree for one block string, re-verifying against the scratch
/// recomputation after every power-of-two extension and at the end.
fn verify_tree_for_word(word: &[u64], sigma: u32) -> bool {
    let params = Params::with_block_size(word.len(), sigma, 1).unwrap();
    let mut st = SuffixTree::new(&params);
    for (i, &b) in word.iter().enumerate() {
        st.extend(b);
        let t = i + 1;
        if t.is_power_of_two() || t == word.len() {
            if !order_index_matches_dfs(&st, &word[..t], params.r, params.w) {
                return false;
            }
        }
    }
    true
}

#[test]
fn criterion_5_structure_mirrors() {
    let bv_bad = check_bitvec_mirror(100_000, 0xb17_5eed);
    let wt_bad = check_wavelet_mirror(100_000, 0x3a7e_1e7);

    // Order-index verification across block-string domains. The full
    // 4-letter length-12 space is enumerable but takes hours; the default
    // run covers it exhaustively at shorter lengths plus a seeded sample at
    // length 12. Set BLZ_EXHAUSTIVE=full for the complete enumeration.
    let full = std::env::var("BLZ_EXHAUSTIVE").as_deref() == Ok("full");
    let mut ord_bad = 0usize;
    let mut words = 0usize;
    let mut word = Vec::new();
    let domains: Vec<(u32, usize)> = if full {
        vec![(2, 12), (3, 12), (4, 12)]
    } else {
        vec![(2, 12), (3, 8), (4, 7)]
    };
    for (sigma, max_t) in domains {
        for t in 1..=max_t {
            for id in 0..(sigma as u64).pow(t as u32) {
                word.clear();
                let mut x = id;
                for _ in 0..t {
                    word.push(x % sigma as u64);
                    x /= sigma as u64;
                }
                words += 1;
                if !verify_tree_for_word(&word, sigma) {
                    ord_bad += 1;
                }
            }
        }
    }
    if !full {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0d8_1dec);
        for _ in 0..4000usize {
            let word: Vec<u64> = (0..12).map(|_| rng.gen_range(0..4u64)).collect();
            words += 1;
            if !verify_tree_for_word(&word, 4) {
                ord_bad += 1;
            }
        }
    }

    let ok = bv_bad == 0 && wt_bad == 0 && ord_bad == 0;
    println!(
        "criterion 5 (structure mirrors): {} [bitvec {} bad, wavelet {} bad, order {} bad over {} words]",
        if ok { "PASS" } else { "FAIL" },
        bv_bad,
        wt_bad,
        ord_bad,
        words
    );
    assert!(ok);
}

#[test]
fn criterion_6_size_bounds() {
    let mut ok = true;
    let mut detail = String::new();
    for (i, n) in [100_000usize, 1_000_000].into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x512e + i as u64);
        let text = random_text(&mut rng, n, 4);
        let (_, stats, _) = run_engine(&text, 4, None);
        let leaf_bound = n / stats.r;
        let trie_bound = 1.0 + (2.0 * stats.r as f64).powi(2) * (n as f64).sqrt();
        let pass =
            stats.st_leaves <= leaf_bound && (stats.trie_nodes as f64) <= trie_bound;
        ok &= pass;
        detail.push_str(&format!(
            " n={}: leaves {}/{}, trie {}/{:.0};",
            n, stats.st_leaves, leaf_bound, stats.trie_nodes, trie_bound
        ));
    }
    println!(
        "criterion 6 (structure size bounds): {} [{} ]",
        if ok { "PASS" } else { "FAIL" },
        detail.trim()
    );
    assert!(ok);
}

/// Sink that snapshots the finalized-factor count at every block read.
#[derive(Default)]
struct Snapshots {
    factors: Vec<Factor>,
    reads: Vec<(usize, usize, usize)>, // (factors emitted, confirmed, read_pos)
}

impl FactorSink for Snapshots {
    fn factor(&mut self, f: Factor) {
        self.factors.push(f);
    }
    fn provisional(&mut self, _index: usize, confirmed: usize, read_pos: usize) {
        self.reads.push((self.factors.len(), confirmed, read_pos));
    }
}

#[test]
fn criterion_7_online_lag_and_prefix_stability() {
    let mut cases: Vec<(Vec<Code>, u32)> = structured_corpus()
        .into_iter()
        .map(|(_, text, sigma)| (text, sigma))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a9_c0de);
    for sigma in [2u32, 4, 26] {
        for n in [512usize, 2000, 10_000] {
            cases.push((random_text(&mut rng, n, sigma), sigma));
        }
    }
    let mut lag_violations = 0usize;
    let mut prefix_violations = 0usize;
    let mut reads = 0usize;
    for (text, sigma) in &cases {
        let params = Params::choose(text.len(), *sigma).unwrap();
        let r = params.r;
        let mut engine = Engine::new(params, SliceSource::new(text, *sigma));
        let mut sink = Snapshots::default();
        let stats = engine.run(&mut sink).unwrap();
        lag_violations += stats.lag_violations;
        assert_eq!(sink.reads.len(), stats.blocks_read);
        let want = parse_of(&lz_oracle(text));
        let got = parse_of(&sink.factors);
        // Recompute the lag bound from the sink's own view of the run.
        let mut emitted_chars = vec![0usize; sink.factors.len() + 1];
        for (i, f) in sink.factors.iter().enumerate() {
            emitted_chars[i + 1] = emitted_chars[i] + f.len;
        }
        for &(done, confirmed, read_pos) in &sink.reads {
            reads += 1;
            if read_pos > emitted_chars[done] + confirmed + r {
                lag_violations += 1;
            }
            if got[..done] != want[..done.min(want.len())] {
                prefix_violations += 1;
            }
        }
        if got != want {
            prefix_violations += 1;
        }
    }
    let ok = lag_violations == 0 && prefix_violations == 0;
    println!(
        "criterion 7 (online lag + prefix stability): {} [{} reads, {} lag violations, {} prefix violations]",
        if ok { "PASS" } else { "FAIL" },
        reads,
        lag_violations,
        prefix_violations
    );
    assert!(ok);
}

#[test]
fn criterion_8_scaling_smoke() {
    fn timed_run(n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = random_text(&mut rng, n, 4);
        let start = Instant::now();
        let (factors, _, _) = run_engine(&text, 4, None);
        let secs = start.elapsed().as_secs_f64();
        assert!(!factors.is_empty());
        secs
    }
    fn median_of(mut xs: Vec<f64>) -> f64 {
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs[xs.len() / 2]
    }
    let t17 = median_of((0..5).map(|i| timed_run(1 << 17, 1700 + i)).collect());
    let t18 = median_of((0..5).map(|i| timed_run(1 << 18, 1800 + i)).collect());
    let ratio = t18 / t17;
    let t1m = timed_run(1_000_000, 0xd9a);
    let ok = ratio <= 3.0 && t1m <= 120.0;
    // Soft criterion: constants are machine-dependent, so a miss is reported
    // for investigation rather than failing the build.
    println!(
        "criterion 8 (doubling ratio + absolute wall time, soft): {} [T(2^17)={:.3}s T(2^18)={:.3}s ratio={:.2} (<=3.0), T(1e6)={:.2}s (<=120s)]",
        if ok { "PASS" } else { "SOFT-FAIL" },
        t17,
        t18,
        ratio,
        t1m
    );
}
