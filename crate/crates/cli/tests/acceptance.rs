//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! fails if any criterion fails. Run with `--nocapture` to see the report.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use edgetok_cli::bench::{measure, NamedMesh, Tokenizer};
use edgetok_core::detokenizer::{detokenize, detokenize_ids, orientation_check, DetokenizeOptions};
use edgetok_core::ertk::TokenFile;
use edgetok_core::grammar::{allowed_next, initial_state};
use edgetok_core::halfedge::HalfEdgeMesh;
use edgetok_core::mesh::{dequantize_value, prepare, quantize_value};
use edgetok_core::shapes::{self, golden_patch, golden_vertex};
use edgetok_core::tokenizer::{tokenize_fixed_side_baseline, tokenize_with};
use edgetok_core::{tokenize, QuantizedMesh, Resolution, Token, TokenSequence, Vocabulary};

struct Item {
    name: String,
    mesh: QuantizedMesh,
    ours: TokenSequence,
    fixed: TokenSequence,
}

fn corpus() -> Vec<Item> {
    shapes::corpus()
        .into_iter()
        .map(|(name, raw)| {
            let mesh = prepare(&raw, Resolution::DEFAULT).expect("corpus mesh prepares");
            let ours = tokenize(&mesh).expect("corpus mesh tokenizes");
            let fixed = tokenize_fixed_side_baseline(&mesh).expect("corpus mesh tokenizes");
            Item {
                name,
                mesh,
                ours,
                fixed,
            }
        })
        .collect()
}

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, ok: String, err: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(err)
    }
}

fn golden_tokens() -> Vec<Token> {
    let mut out = vec![Token::Bos];
    for word in "B 1 2 3 N 4 N 5 B 6 1 4 P 7 P 8 P 2 N 9".split_whitespace() {
        match word {
            "B" => out.push(Token::B),
            "N" => out.push(Token::N),
            "P" => out.push(Token::P),
            label => out.extend(golden_vertex(label.parse().unwrap()).map(Token::Coord)),
        }
    }
    out.push(Token::Eos);
    out
}

/// Median wall time of `runs` calls.
fn median_time(runs: usize, mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..runs)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .collect();
    times.sort();
    times[runs / 2]
}

fn ac1_golden() -> Outcome {
    let mesh = golden_patch();
    let seq = tokenize(&mesh).unwrap();
    let elapsed = median_time(101, || {
        std::hint::black_box(tokenize(std::hint::black_box(&mesh)).unwrap());
    });
    check(
        seq.tokens == golden_tokens() && seq.len() == 46 && seq.subsequences() == 2,
        "46 tokens, S=2, exact match".to_string(),
        format!("got {} tokens, S={}: {seq}", seq.len(), seq.subsequences()),
    )?;
    check(
        elapsed < Duration::from_millis(1),
        format!("46 tokens, S=2, exact match, {elapsed:?}"),
        format!("runtime {elapsed:?} >= 1 ms"),
    )
}

fn ac2_roundtrip(items: &[Item]) -> Outcome {
    let faces: Vec<usize> = items.iter().map(|i| i.mesh.face_count()).collect();
    let open = items
        .iter()
        .filter(|i| {
            HalfEdgeMesh::from_mesh(&i.mesh)
                .unwrap()
                .boundary_flags()
                .iter()
                .any(|&b| b)
        })
        .count();
    let failures: Vec<&str> = items
        .iter()
        .filter(|i| {
            detokenize(&i.ours)
                .map(|m| m.canonical() != i.mesh.canonical())
                .unwrap_or(true)
        })
        .map(|i| i.name.as_str())
        .collect();
    let (lo, hi) = (*faces.iter().min().unwrap(), *faces.iter().max().unwrap());
    check(
        items.len() >= 50
            && failures.is_empty()
            && lo >= 4
            && hi <= 4000
            && open > 0
            && open < items.len(),
        format!(
            "{} meshes ({open} open, {} closed, {lo}..{hi} faces) all canonically equal",
            items.len(),
            items.len() - open
        ),
        format!(
            "{} meshes, {lo}..{hi} faces, failures: {failures:?}",
            items.len()
        ),
    )
}

fn ac3_length_law(items: &[Item]) -> Outcome {
    let bad: Vec<&str> = items
        .iter()
        .filter(|i| {
            let f = i.mesh.face_count();
            i.ours.len() != 2 + 4 * f + 6 * i.ours.subsequences()
                || i.fixed.len() != 2 + 3 * f + 7 * i.fixed.subsequences()
        })
        .map(|i| i.name.as_str())
        .collect();
    check(
        bad.is_empty(),
        format!("2+4F+6S and 2+3F+7S_b exact on {} meshes", items.len()),
        format!("violations on {bad:?}"),
    )
}

fn ac4_compression(items: &[Item]) -> Outcome {
    let large: Vec<&Item> = items
        .iter()
        .filter(|i| i.mesh.face_count() >= 200)
        .collect();
    let body = |i: &Item| (i.ours.len() - 2) as f64;
    let n = large.len() as f64;
    let tpf = large
        .iter()
        .map(|i| body(i) / i.mesh.face_count() as f64)
        .sum::<f64>()
        / n;
    let ratio = large
        .iter()
        .map(|i| body(i) / (9.0 * i.mesh.face_count() as f64))
        .sum::<f64>()
        / n;
    let summary = format!(
        "{} meshes with >=200 faces: mean {tpf:.3} tokens/face, mean ratio {:.1}%",
        large.len(),
        100.0 * ratio
    );
    check(
        !large.is_empty() && (4.0..=5.0).contains(&tpf) && ratio <= 0.55,
        summary.clone(),
        summary,
    )
}

fn ac5_subsequences(items: &[Item]) -> Outcome {
    let golden = golden_patch();
    let s = tokenize(&golden).unwrap().subsequences();
    let sb = tokenize_fixed_side_baseline(&golden)
        .unwrap()
        .subsequences();
    let n = items.len() as f64;
    let mean_s = items
        .iter()
        .map(|i| i.ours.subsequences() as f64)
        .sum::<f64>()
        / n;
    let mean_sb = items
        .iter()
        .map(|i| i.fixed.subsequences() as f64)
        .sum::<f64>()
        / n;
    let summary =
        format!("golden S={s} vs S_b={sb}; corpus mean S={mean_s:.2} vs S_b={mean_sb:.2}");
    check(
        s == 2 && sb == 5 && mean_s < mean_sb,
        summary.clone(),
        summary,
    )
}

/// Samples a grammatical sequence by drawing uniformly among allowed token
/// classes, ending once roughly `target` faces have been produced.
fn random_grammatical(rng: &mut ChaCha8Rng, vocab: &Vocabulary, target: u32) -> Vec<u32> {
    let r = u32::from(vocab.resolution().get());
    let mut state = initial_state();
    let mut ids = Vec::new();
    while !state.is_accepted() {
        let mask = allowed_next(&state, vocab);
        let id = if mask.is_allowed(0) {
            rng.gen_range(0..r)
        } else if mask.is_allowed(vocab.eos()) && (state.faces() >= target || rng.gen_bool(0.05)) {
            vocab.eos()
        } else {
            let options: Vec<u32> = [vocab.b(), vocab.n(), vocab.p(), vocab.bos()]
                .into_iter()
                .filter(|&id| mask.is_allowed(id))
                .collect();
            options[rng.gen_range(0..options.len())]
        };
        let token = vocab.token(id).unwrap();
        state = state.advance(token).expect("sampled from the mask");
        ids.push(id);
    }
    ids
}

fn ac6_grammar(items: &[Item]) -> Outcome {
    let mut prefixes = 0usize;
    for item in items {
        let vocab = item.ours.vocabulary();
        let mut state = initial_state();
        for token in &item.ours.tokens {
            let id = vocab.id(*token).unwrap();
            if !allowed_next(&state, &vocab).is_allowed(id) {
                return Err(format!(
                    "{}: token {token} at {} not allowed",
                    item.name, state.position
                ));
            }
            state = state.advance(*token).unwrap();
            prefixes += 1;
        }
        if !allowed_next(&state, &vocab).allowed_ids().is_empty() {
            return Err(format!("{}: mask after EOS is not empty", item.name));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let vocabs = [
        Vocabulary::new(Resolution::DEFAULT),
        Vocabulary::new(Resolution::new(128).unwrap()),
        Vocabulary::new(Resolution::new(8).unwrap()),
    ];
    let samples = 100_000;
    for k in 0..samples {
        let vocab = &vocabs[k % vocabs.len()];
        let target = rng.gen_range(1..=24);
        let ids = random_grammatical(&mut rng, vocab, target);
        if let Err(e) = detokenize_ids(&ids, vocab, DetokenizeOptions::default()) {
            return Err(format!("sample {k} failed to decode: {e}"));
        }
    }
    Ok(format!(
        "{prefixes} corpus prefixes allowed; {samples} random grammatical sequences decode"
    ))
}

fn ac7_orientation(items: &[Item]) -> Outcome {
    let bad: Vec<&str> = items
        .iter()
        .filter(|i| !orientation_check(&detokenize(&i.ours).unwrap()).consistent)
        .map(|i| i.name.as_str())
        .collect();
    check(
        bad.is_empty(),
        format!("{} decoded meshes consistently oriented", items.len()),
        format!("inconsistent: {bad:?}"),
    )
}

fn ac8_quantization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut report = Vec::new();
    for cells in [128u32, 512] {
        let r = Resolution::new(cells).unwrap();
        let bound = 1.0 / (2.0 * f64::from(cells)) + 1e-9;
        let mut worst = 0.0f64;
        for _ in 0..1_000_000 {
            let v: f64 = rng.gen_range(0.0..=1.0);
            worst = worst.max((dequantize_value(quantize_value(v, r), r) - v).abs());
        }
        for v in [0.0, 1.0] {
            worst = worst.max((dequantize_value(quantize_value(v, r), r) - v).abs());
        }
        if worst > bound {
            return Err(format!("R={cells}: max error {worst:e} > {bound:e}"));
        }
        if let Some(q) = (0..r.get()).find(|&q| quantize_value(dequantize_value(q, r), r) != q) {
            return Err(format!("R={cells}: quantize(dequantize({q})) != {q}"));
        }
        report.push(format!("R={cells} max err {worst:.3e}"));
    }
    Ok(format!("{}; identity exact", report.join(", ")))
}

fn ac9_throughput(items: &[Item]) -> Outcome {
    let res = Resolution::DEFAULT;
    let mesh_1k = prepare(&shapes::grid(25, 20), res).unwrap();
    let mesh_4k = prepare(&shapes::grid(50, 40), res).unwrap();
    assert_eq!((mesh_1k.face_count(), mesh_4k.face_count()), (1000, 4000));
    let time = |m: &QuantizedMesh| {
        median_time(21, || {
            std::hint::black_box(tokenize(std::hint::black_box(m)).unwrap());
        })
    };
    let (t1k, t4k) = (time(&mesh_1k), time(&mesh_4k));

    // tokenize_with keeps the comparison on the traversal alone when it matters
    let he = HalfEdgeMesh::from_mesh(&mesh_4k).unwrap();
    let walk_4k = median_time(21, || {
        std::hint::black_box(tokenize_with(&mesh_4k, &he));
    });

    let named: Vec<NamedMesh> = items
        .iter()
        .map(|i| NamedMesh {
            name: i.name.clone(),
            mesh: i.mesh.clone(),
        })
        .collect();
    let repeat = 10;
    let (_, wall1) = measure(Tokenizer::Ours, &named, 1, repeat);
    let (_, wall8) = measure(Tokenizer::Ours, &named, 8, repeat);
    let speedup = wall1 / wall8;
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());

    let summary = format!(
        "1k faces {t1k:?}, 4k faces {t4k:?} (traversal only {walk_4k:?}); \
         8-job speedup {speedup:.2}x on {cores} available core(s)"
    );
    check(
        t1k < Duration::from_millis(10) && t4k < Duration::from_millis(50) && speedup >= 4.0,
        summary.clone(),
        summary,
    )
}

fn ac10_ertk(items: &[Item]) -> Outcome {
    for item in items {
        let file = TokenFile::from_sequence(&item.ours);
        let back =
            TokenFile::from_bytes(&file.to_bytes()).map_err(|e| format!("{}: {e}", item.name))?;
        if back.resolution() != item.mesh.resolution() || back.ids_u32() != item.ours.ids() {
            return Err(format!(
                "{}: ERTK round trip changed the contents",
                item.name
            ));
        }
    }
    let mut bytes = b"ERTK\x01\x08\x00\x0c\x00\x00\x00".to_vec();
    for id in [11u16, 8, 0, 0, 7, 1, 0, 0, 0, 1, 0, 12] {
        bytes.extend_from_slice(&id.to_le_bytes());
    }
    let file = TokenFile::from_bytes(&bytes).map_err(|e| e.to_string())?;
    let mesh = detokenize_ids(&file.ids_u32(), &file.vocab, DetokenizeOptions::default())
        .map_err(|e| e.to_string())?;
    check(
        file.ids.len() == 12 && mesh.face_count() == 1 && mesh.vertex_count() == 3,
        format!(
            "{} files round-trip; 12-token file decodes to one triangle",
            items.len()
        ),
        format!("hand-built file decoded to {} faces", mesh.face_count()),
    )
}

#[test]
fn acceptance() {
    let items = corpus();
    let criteria: Vec<Criterion> = vec![
        ("AC1", "golden sequence", Box::new(ac1_golden)),
        (
            "AC2",
            "lossless round trip",
            Box::new(|| ac2_roundtrip(&items)),
        ),
        ("AC3", "length law", Box::new(|| ac3_length_law(&items))),
        ("AC4", "compression", Box::new(|| ac4_compression(&items))),
        (
            "AC5",
            "sub-sequence advantage",
            Box::new(|| ac5_subsequences(&items)),
        ),
        ("AC6", "grammar soundness", Box::new(|| ac6_grammar(&items))),
        ("AC7", "orientation", Box::new(|| ac7_orientation(&items))),
        ("AC8", "quantization", Box::new(ac8_quantization)),
        ("AC9", "throughput", Box::new(|| ac9_throughput(&items))),
        ("AC10", "ERTK format", Box::new(|| ac10_ertk(&items))),
    ];

    let mut failed = Vec::new();
    for (id, title, run) in &criteria {
        match run() {
            Ok(detail) => println!("[PASS] {id} {title}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {id} {title}: {detail}");
                failed.push(*id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
