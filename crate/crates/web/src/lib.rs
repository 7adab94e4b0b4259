//! WebAssembly bindings for the browser demo.
//!
//! Each exported function has a plain Rust counterpart returning
//! `Result<String, String>` so the logic can be tested natively.

use ktd_core::datagen::{generate_suite, SyntheticSpec, REFERENCE_LABEL};
use ktd_core::formats::{read_populations_csv, write_populations_csv};
use ktd_core::{
    build_diagram, render, DiagramMode, DiagramOptions, KernelConfig, Population, RenderOptions,
};
use wasm_bindgen::prelude::*;

/// Largest sample count the page accepts. The median heuristic keeps every
/// pairwise distance of the pooled sample in memory.
pub const MAX_SAMPLES: u32 = 1000;

fn parse_mode(mode: &str) -> Result<DiagramMode, String> {
    match mode {
        "taylor" => Ok(DiagramMode::Taylor),
        "ktd" => Ok(DiagramMode::KernelizedTaylor),
        other => Err(format!(
            "unknown diagram mode `{other}` (expected `taylor` or `ktd`)"
        )),
    }
}

/// A non-positive or non-finite `sigma` selects the median heuristic.
fn kernel_options(sigma: f64, standardize: bool) -> DiagramOptions {
    let kernel = if sigma.is_finite() && sigma > 0.0 {
        KernelConfig::fixed(sigma)
    } else {
        KernelConfig::median()
    };
    DiagramOptions {
        kernel,
        standardize,
    }
}

fn demo_spec(
    seed: u32,
    samples: u32,
    noise_std: f64,
    outlier_count: u32,
) -> Result<SyntheticSpec, String> {
    if samples > MAX_SAMPLES {
        return Err(format!(
            "at most {MAX_SAMPLES} samples are supported in the browser"
        ));
    }
    let spec = SyntheticSpec {
        n_samples: samples as usize,
        noise_std,
        outlier_count: outlier_count as usize,
        ..SyntheticSpec::with_seed(u64::from(seed))
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn draw(
    populations: &[Population],
    reference: &Population,
    mode: &str,
    options: &DiagramOptions,
) -> Result<String, String> {
    let model = build_diagram(populations, reference, parse_mode(mode)?, options)
        .map_err(|e| e.to_string())?;
    render(&model, &RenderOptions::default()).map_err(|e| e.to_string())
}

pub fn demo_svg(
    seed: u32,
    samples: u32,
    noise_std: f64,
    outlier_count: u32,
    sigma: f64,
    mode: &str,
) -> Result<String, String> {
    let suite = generate_suite(&demo_spec(seed, samples, noise_std, outlier_count)?)
        .map_err(|e| e.to_string())?;
    draw(
        &suite.populations,
        &suite.reference,
        mode,
        &kernel_options(sigma, false),
    )
}

pub fn demo_csv_text(
    seed: u32,
    samples: u32,
    noise_std: f64,
    outlier_count: u32,
) -> Result<String, String> {
    let suite = generate_suite(&demo_spec(seed, samples, noise_std, outlier_count)?)
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    write_populations_csv(&mut out, suite.all()).map_err(|e| e.to_string())?;
    String::from_utf8(out).map_err(|e| e.to_string())
}

pub fn csv_svg(
    csv: &str,
    reference: &str,
    mode: &str,
    sigma: f64,
    standardize: bool,
) -> Result<String, String> {
    let populations = read_populations_csv(csv.as_bytes()).map_err(|e| e.to_string())?;
    let (refs, others): (Vec<_>, Vec<_>) = populations
        .into_iter()
        .partition(|p| p.label() == reference);
    let reference = refs
        .into_iter()
        .next()
        .ok_or_else(|| format!("reference label `{reference}` does not name any population"))?;
    draw(
        &others,
        &reference,
        mode,
        &kernel_options(sigma, standardize),
    )
}

/// Renders the synthetic benchmark as SVG markup.
#[wasm_bindgen(js_name = renderDemo)]
pub fn render_demo(
    seed: u32,
    samples: u32,
    noise_std: f64,
    outlier_count: u32,
    sigma: f64,
    mode: &str,
) -> Result<String, JsError> {
    demo_svg(seed, samples, noise_std, outlier_count, sigma, mode).map_err(|e| JsError::new(&e))
}

/// The synthetic benchmark as CSV text, for editing on the page.
#[wasm_bindgen(js_name = demoCsv)]
pub fn demo_csv(
    seed: u32,
    samples: u32,
    noise_std: f64,
    outlier_count: u32,
) -> Result<String, JsError> {
    demo_csv_text(seed, samples, noise_std, outlier_count).map_err(|e| JsError::new(&e))
}

/// Renders populations from CSV text against the named reference.
#[wasm_bindgen(js_name = renderCsv)]
pub fn render_csv(
    csv: &str,
    reference: &str,
    mode: &str,
    sigma: f64,
    standardize: bool,
) -> Result<String, JsError> {
    csv_svg(csv, reference, mode, sigma, standardize).map_err(|e| JsError::new(&e))
}

/// Label of the reference population in generated CSV.
#[wasm_bindgen(js_name = demoReferenceLabel)]
pub fn demo_reference_label() -> String {
    REFERENCE_LABEL.to_string()
}
