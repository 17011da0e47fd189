//! Report writer: TOML emitted in a fixed field order with every float at
//! 17 significant digits, so identical runs produce byte-identical files
//! that parse back to exactly the same numbers.

use pcmk_core::pseudocone::PseudoCone;
use pcmk_core::weight::WeightKind;

use crate::problem::Problem;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_vec(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|x| fmt_f64(*x)).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_mat(m: &[Vec<f64>]) -> String {
    let inner: Vec<String> = m.iter().map(|v| fmt_vec(v)).collect();
    format!("[{}]", inner.join(", "))
}

pub struct ReportBuilder {
    lines: Vec<String>,
}

impl ReportBuilder {
    pub fn new(command: &str, seed: u64, timing: Option<f64>) -> Self {
        let mut lines = vec![
            "version = \"1\"".to_string(),
            format!("tool = \"pcmk {}\"", env!("CARGO_PKG_VERSION")),
            format!("command = {command:?}"),
            format!("seed = {seed}"),
        ];
        if let Some(t) = timing {
            lines.push(format!("timing_seconds = {}", fmt_f64(t)));
        }
        lines.push(String::new());
        ReportBuilder { lines }
    }

    pub fn echo_input(&mut self, p: &Problem) {
        self.lines.push("[input]".into());
        self.lines.push(format!("dim = {}", p.cone.dim()));
        self.lines
            .push(format!("cone_normals = {}", fmt_mat(p.cone.facet_normals())));
        self.lines
            .push(format!("cone_rays = {}", fmt_mat(p.cone.rays())));
        self.lines
            .push(format!("v_frak = {}", fmt_vec(p.cone.v_frak())));
        let kind = match p.weight.kind() {
            WeightKind::RadialPower => "radial-power",
            WeightKind::HeightPower => "height-power",
        };
        self.lines.push(format!("weight_kind = {kind:?}"));
        self.lines.push(format!("q = {}", fmt_f64(p.weight.q())));
        if let Some(measure) = &p.measure {
            self.lines.push(format!(
                "measure_directions = {}",
                fmt_mat(measure.directions())
            ));
            self.lines
                .push(format!("measure_masses = {}", fmt_vec(measure.masses())));
        }
        if let Some(body) = &p.body {
            self.lines
                .push(format!("body_directions = {}", fmt_mat(body.directions())));
            self.lines
                .push(format!("body_support = {}", fmt_vec(body.support_numbers())));
        }
        self.lines.push(String::new());
    }

    pub fn section(&mut self, name: &str) {
        self.lines.push(format!("[{name}]"));
    }

    pub fn kv_str(&mut self, key: &str, value: &str) {
        self.lines.push(format!("{key} = {value:?}"));
    }

    pub fn kv_bool(&mut self, key: &str, value: bool) {
        self.lines.push(format!("{key} = {value}"));
    }

    pub fn kv_int(&mut self, key: &str, value: i64) {
        self.lines.push(format!("{key} = {value}"));
    }

    pub fn kv_f64(&mut self, key: &str, value: f64) {
        self.lines.push(format!("{key} = {}", fmt_f64(value)));
    }

    pub fn kv_vec(&mut self, key: &str, value: &[f64]) {
        self.lines.push(format!("{key} = {}", fmt_vec(value)));
    }

    pub fn kv_mat(&mut self, key: &str, value: &[Vec<f64>]) {
        self.lines.push(format!("{key} = {}", fmt_mat(value)));
    }

    pub fn blank(&mut self) {
        self.lines.push(String::new());
    }

    /// Facet geometry of a body as an array of tables.
    pub fn facets(&mut self, body: &PseudoCone) {
        if let Ok(fc) = body.facet_complex() {
            for (i, facet) in fc.facets.iter().enumerate() {
                self.lines.push("[[facet]]".into());
                self.lines.push(format!("index = {i}"));
                self.lines
                    .push(format!("direction = {}", fmt_vec(&body.directions()[i])));
                self.lines.push(format!(
                    "support = {}",
                    fmt_f64(body.support_numbers()[i])
                ));
                self.lines.push(format!("vertices = {}", fmt_mat(facet)));
                self.lines.push(String::new());
            }
        }
    }

    pub fn finish(self) -> String {
        let mut text = self.lines.join("\n");
        while text.ends_with('\n') {
            text.pop();
        }
        text.push('\n');
        text
    }
}

/// Reports must round-trip through a TOML parser.
pub fn parse(text: &str) -> Result<toml::Value, String> {
    toml::from_str::<toml::Value>(text).map_err(|e| format!("report does not parse: {e}"))
}
