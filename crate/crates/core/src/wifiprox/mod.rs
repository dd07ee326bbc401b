//! Proximity inferred from WiFi scan similarity, evaluated against the
//! Bluetooth reference with precision (PPV) and recall.

mod eval;
mod measures;

pub use eval::{
    best_pair_scores, evaluate, group_scans, infer_network, score_networks, write_eval_csv,
    Confusion, EvalReport, EvalRow, ScanBins, WIFI_BIN_WIDTH_S,
};
pub use measures::{
    assemble_scans, mean_manhattan, overlap_count, overlap_coefficient, strongest_ap_match,
    MeasureKind, SimilarityMeasure, WifiScan,
};
