use s3gnd::core::workload::{gen_synthetic, SynthConfig};
use s3gnd::core::{BuildConfig, EmbeddingTable, QueryEngine, TreeIndex};
use s3gnd::formats::embeddings::{read_embeddings, write_embeddings};
use s3gnd::formats::graph::{read_graph, write_graph};
use s3gnd::formats::index::{load_index, save_index};

fn small() -> s3gnd::core::Graph {
    gen_synthetic(&SynthConfig { n: 500, sigma_size: 30, seed: 4, ..Default::default() }).unwrap()
}

#[test]
fn files_round_trip_and_bind_together() {
    let tmp = tempfile::tempdir().unwrap();
    let g = small();
    write_graph(tmp.path().join("g.txt"), &g).unwrap();
    let g2 = read_graph(tmp.path().join("g.txt")).unwrap();
    assert_eq!(g, g2);
    assert_eq!(g.fingerprint(), g2.fingerprint());

    let t = EmbeddingTable::fallback(g.keyword_domain(), 12, 8).unwrap();
    write_embeddings(tmp.path().join("e.txt"), &t).unwrap();
    let t2 = read_embeddings(tmp.path().join("e.txt")).unwrap();
    assert_eq!(t, t2);

    let ix = TreeIndex::build(&g2, &t2, &BuildConfig { fanout: 8, ..Default::default() }).unwrap();
    save_index(tmp.path().join("ix.bin"), &ix).unwrap();
    let ix2 = load_index(tmp.path().join("ix.bin")).unwrap();
    assert_eq!(ix, ix2);
    assert!(QueryEngine::new(&g, &ix2, &t).is_ok());

    let other = EmbeddingTable::fallback(g.keyword_domain(), 12, 9).unwrap();
    assert!(QueryEngine::new(&g, &ix2, &other).is_err());
    let g3 = gen_synthetic(&SynthConfig { n: 500, sigma_size: 30, seed: 5, ..Default::default() }).unwrap();
    assert!(QueryEngine::new(&g3, &ix2, &t).is_err());
}
