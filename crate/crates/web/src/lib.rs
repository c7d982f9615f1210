//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The exported functions are thin wrappers over plain Rust ones that
//! return `Result<_, String>`, so the logic is tested natively.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use ltree_core::eventlog::Clock;
use ltree_core::keys::key_event;
use ltree_core::lsystem::parse_grammar;
use ltree_core::social::DEFAULT_PRUNE_THRESHOLD;
use ltree_core::turtle::TurtleConfig;
use ltree_core::{emit_svg, koch_quadratic, rewrite, Session, SvgStyle};
use wasm_bindgen::prelude::*;

pub const MAX_KOCH_ITERATIONS: u32 = 6;

/// Timestamps come from the page, not from the system clock.
#[derive(Debug, Clone, Default)]
struct PageClock(Arc<AtomicU64>);

impl Clock for PageClock {
    fn now_ms(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// One account tree driven by the `P F C S L V R` keys.
#[wasm_bindgen]
pub struct TreeDemo {
    session: Session,
    clock: PageClock,
    threshold: u64,
    style: SvgStyle,
}

impl TreeDemo {
    pub fn create(seed: u64) -> Self {
        let clock = PageClock::default();
        Self {
            session: Session::in_memory(seed).with_clock(clock.clone()),
            clock,
            threshold: DEFAULT_PRUNE_THRESHOLD,
            style: SvgStyle::default(),
        }
    }

    /// Applies one key and returns a one-line report.
    pub fn press_key(&mut self, key: char, now_ms: u64) -> Result<String, String> {
        let payload = key_event(key, self.threshold).ok_or_else(|| format!("unknown key '{key}'"))?;
        self.clock.0.store(now_ms, Ordering::Relaxed);
        let applied = self.session.apply("user", payload).map_err(|e| e.to_string())?;
        let mut report = format!("#{} {}", applied.seq, payload.type_name());
        if let Some(post) = applied.effect.target {
            report.push_str(&format!(" on post {post}"));
        }
        if matches!(payload, ltree_core::Payload::Prune { .. }) {
            let ids: Vec<String> = applied.effect.pruned.iter().map(|n| n.to_string()).collect();
            report.push_str(&format!(": pruned [{}]", ids.join(", ")));
        }
        Ok(report)
    }
}

#[wasm_bindgen]
impl TreeDemo {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u32) -> TreeDemo {
        Self::create(u64::from(seed))
    }

    pub fn press(&mut self, key: &str, now_ms: f64) -> Result<String, JsValue> {
        let mut chars = key.chars();
        let (Some(c), None) = (chars.next(), chars.next()) else {
            return Err(JsValue::from_str("press takes a single key"));
        };
        self.press_key(c, now_ms as u64).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen(js_name = setThreshold)]
    pub fn set_threshold(&mut self, threshold: u32) {
        self.threshold = u64::from(threshold);
    }

    pub fn status(&self) -> String {
        self.session.status().to_string()
    }

    pub fn svg(&self) -> String {
        self.session.svg(&self.style)
    }

    /// The event log, one JSON record per line.
    pub fn log(&self) -> String {
        self.session.log().to_text()
    }
}

pub fn koch(n: u32) -> Result<String, String> {
    if n > MAX_KOCH_ITERATIONS {
        return Err(format!("at most {MAX_KOCH_ITERATIONS} iterations"));
    }
    let cfg = TurtleConfig { start_heading: 0.0, step_length: (729 / 3u32.pow(n)).max(1) as f64, ..TurtleConfig::default() };
    let g = koch_quadratic(n, &cfg).map_err(|e| e.to_string())?;
    Ok(emit_svg(&g, &SvgStyle { stroke_width: 1.0, ..SvgStyle::default() }))
}

pub fn rewrite_text(grammar: &str, iterations: u32, seed: u64) -> Result<String, String> {
    let g = parse_grammar(grammar).map_err(|e| e.to_string())?;
    rewrite(&g, g.axiom(), iterations, seed).map(|s| s.to_string()).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = kochSvg)]
pub fn koch_svg(n: u32) -> Result<String, JsValue> {
    koch(n).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = rewriteGrammar)]
pub fn rewrite_grammar(grammar: &str, iterations: u32, seed: u32) -> Result<String, JsValue> {
    rewrite_text(grammar, iterations, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}
