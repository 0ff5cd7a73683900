use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use effidx_ffi::*;

fn fgn(h: f64, t: usize, seed: u64) -> *mut EffidxReturns {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { effidx_synth_fgn(h, t, seed, &mut r) }, EffidxStatus::Ok);
    r
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(effidx_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn estimators_through_the_abi() {
    let r = fgn(0.5, 4096, 11);
    unsafe {
        assert_eq!(effidx_returns_len(r), 4096);
        for m in [EffidxHurstMethod::Dfa, EffidxHurstMethod::Dma, EffidxHurstMethod::Hhca] {
            let (mut raw, mut cl) = (f64::NAN, f64::NAN);
            assert_eq!(effidx_hurst(r, m, &mut raw, &mut cl), EffidxStatus::Ok);
            assert!((raw - 0.5).abs() < 0.1, "{m:?} {raw}");
            assert_eq!(cl, raw.clamp(0.0, 1.0));
        }
        for m in [
            EffidxFractalMethod::Periodogram,
            EffidxFractalMethod::Wavelet,
            EffidxFractalMethod::Genton,
            EffidxFractalMethod::HallWood,
        ] {
            let mut d = f64::NAN;
            assert_eq!(effidx_fractal(r, m, &mut d, ptr::null_mut()), EffidxStatus::Ok);
            assert!((d - 1.5).abs() < 0.2, "{m:?} {d}");
        }
        let mut rho = f64::NAN;
        assert_eq!(effidx_acf1(r, &mut rho), EffidxStatus::Ok);
        assert!(rho.abs() < 0.1);
        let (mut stat, mut bw, mut v) = (f64::NAN, 0usize, EffidxKpssVerdict::Reject1);
        assert_eq!(effidx_kpss(r, 0, &mut stat, &mut bw, &mut v), EffidxStatus::Ok);
        assert_eq!(bw, 10);
        assert!(stat >= 0.0);
        effidx_returns_free(r);
    }
}

#[test]
fn report_handle_matches_library() {
    let r = fgn(0.7, 4096, 3);
    unsafe {
        let mut rep = ptr::null_mut();
        assert_eq!(effidx_analyze(r, &mut rep), EffidxStatus::Ok);
        let lib = effidx::analyze(
            &effidx::synth::generate(&effidx::synth::SynthSpec::fgn(0.7, 4096, 3)).unwrap(),
            &effidx::AnalysisConfig::default(),
        )
        .unwrap();
        assert_eq!(effidx_report_ei(rep), lib.ei);

        let (mut defined, mut l, mut g) = (false, f64::NAN, f64::NAN);
        assert_eq!(
            effidx_report_shares(rep, &mut defined, &mut l, &mut g),
            EffidxStatus::Ok
        );
        assert!(defined);
        assert!((l + g - 1.0).abs() < 1e-12);

        let mut raw8 = [0.0; 8];
        for (i, m) in [
            EffidxMeasure::HDfa,
            EffidxMeasure::HDma,
            EffidxMeasure::HHhca,
            EffidxMeasure::DPeriodogram,
            EffidxMeasure::DWavelet,
            EffidxMeasure::DGenton,
            EffidxMeasure::DHallWood,
            EffidxMeasure::Rho1,
        ]
        .into_iter()
        .enumerate()
        {
            assert_eq!(
                effidx_report_estimate(rep, m, &mut raw8[i], ptr::null_mut()),
                EffidxStatus::Ok
            );
        }
        let mut ei = f64::NAN;
        assert_eq!(effidx_efficiency_index(raw8.as_ptr(), &mut ei), EffidxStatus::Ok);
        assert!((ei - lib.ei).abs() < 1e-15);

        let json = effidx_report_to_json(rep);
        assert!(!json.is_null());
        let parsed: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(parsed["ei"].as_f64().unwrap(), lib.ei);
        effidx_string_free(json);
        effidx_report_free(rep);
        effidx_returns_free(r);
    }
}

#[test]
fn efficiency_index_identities() {
    let ideal = [0.5, 0.5, 0.5, 1.5, 1.5, 1.5, 1.5, 0.0];
    let extreme = [1.0, 0.0, 1.0, 1.0, 2.0, 1.0, 2.0, -1.0];
    let mut ei = f64::NAN;
    unsafe {
        assert_eq!(effidx_efficiency_index(ideal.as_ptr(), &mut ei), EffidxStatus::Ok);
        assert_eq!(ei, 0.0);
        assert_eq!(effidx_efficiency_index(extreme.as_ptr(), &mut ei), EffidxStatus::Ok);
        assert!((ei - 8f64.sqrt() / 2.0).abs() < 1e-12);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(
            effidx_returns_from_prices([1.0, -2.0].as_ptr(), 2, &mut r),
            EffidxStatus::InvalidInput
        );
        assert!(r.is_null());
        assert!(last_error().contains("non-positive"));

        assert_eq!(
            effidx_returns_from_values(ptr::null(), 5, &mut r),
            EffidxStatus::NullPointer
        );
        assert_eq!(effidx_synth_fgn(0.5, 1000, 1, &mut r), EffidxStatus::Parameter);
        assert_eq!(effidx_acf1(ptr::null(), ptr::null_mut()), EffidxStatus::NullPointer);

        let short = [0.01, -0.02, 0.03, 0.0, 0.01];
        assert_eq!(
            effidx_returns_from_values(short.as_ptr(), short.len(), &mut r),
            EffidxStatus::Ok
        );
        let mut h = 0.0;
        assert_eq!(
            effidx_hurst(r, EffidxHurstMethod::Dma, &mut h, ptr::null_mut()),
            EffidxStatus::InsufficientData
        );
        assert!(last_error().starts_with("insufficient data"));
        effidx_returns_free(r);

        let flat = vec![0.001; 300];
        assert_eq!(
            effidx_returns_from_values(flat.as_ptr(), flat.len(), &mut r),
            EffidxStatus::Ok
        );
        let mut rep = ptr::null_mut();
        assert_eq!(effidx_analyze(r, &mut rep), EffidxStatus::DegenerateInput);
        assert!(rep.is_null());
        assert!(last_error().contains("constant returns"));
        effidx_returns_free(r);

        let prices: Vec<f64> = (0..300).map(|i| 100.0 * (1.0 + 0.3 * (i as f64 * 0.7).sin())).collect();
        assert_eq!(
            effidx_returns_from_prices(prices.as_ptr(), prices.len(), &mut r),
            EffidxStatus::Ok
        );
        assert_eq!(effidx_returns_len(r), 299);
        effidx_returns_free(r);

        effidx_returns_free(ptr::null_mut());
        effidx_report_free(ptr::null_mut());
        effidx_string_free(ptr::null_mut());
        assert!(effidx_report_ei(ptr::null()).is_nan());
    }
}

#[test]
fn header_declares_every_export() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/effidx.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "effidx_last_error_message",
        "effidx_returns_from_values",
        "effidx_returns_from_prices",
        "effidx_synth_fgn",
        "effidx_returns_len",
        "effidx_returns_free",
        "effidx_hurst",
        "effidx_fractal",
        "effidx_acf1",
        "effidx_kpss",
        "effidx_efficiency_index",
        "effidx_analyze",
        "effidx_report_ei",
        "effidx_report_shares",
        "effidx_report_estimate",
        "effidx_report_to_json",
        "effidx_string_free",
        "effidx_report_free",
        "typedef struct EffidxReturns EffidxReturns",
        "typedef struct EffidxReport EffidxReport",
        "EFFIDX_STATUS_PANIC = 99",
    ] {
        assert!(text.contains(sym), "header lacks {sym}");
    }
    // the header must also be valid C when a compiler is available
    if let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-std=c99"])
        .arg(&header)
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
