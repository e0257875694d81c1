//! Interactive session protocol shared by the HTTP and stdio transports.
//!
//! Requests are JSON objects `{"op": "place", "height": 0.3}`, `{"op":
//! "state"}` or `{"op": "reset"}`. Every response carries a sequence number
//! that grows by one per request within the session.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use squarepack::{Packer, PackerConfig, PlacementOutcome, Rect, ShelfId, SizeClass, Snapshot};

use crate::input::parse_json_height;

#[derive(Debug, Deserialize)]
pub struct Request<'a> {
    pub op: String,
    #[serde(borrow, default)]
    pub height: Option<&'a RawValue>,
}

#[derive(Debug, Deserialize)]
pub struct PlaceBody<'a> {
    #[serde(borrow)]
    pub height: &'a RawValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Placed,
    Rejected,
    Ok,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub seq: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<SizeClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shelf_id: Option<ShelfId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<Box<Snapshot>>,
    pub cumulative_area: f64,
    pub budget_remaining: f64,
}

#[derive(Debug, Clone)]
pub struct Session {
    config: PackerConfig,
    packer: Packer,
    seq: u64,
}

impl Session {
    pub fn new(config: PackerConfig) -> Self {
        Session {
            config,
            packer: Packer::new(config),
            seq: 0,
        }
    }

    pub fn packer(&self) -> &Packer {
        &self.packer
    }

    fn respond(&mut self, status: Status) -> Response {
        self.seq += 1;
        Response {
            seq: self.seq,
            status,
            id: None,
            rect: None,
            class: None,
            shelf_id: None,
            reason: None,
            detail: None,
            snapshot: None,
            cumulative_area: self.packer.cumulative_area(),
            budget_remaining: self.packer.budget_remaining(),
        }
    }

    pub fn reject(&mut self, reason: &str, detail: impl Into<String>) -> Response {
        let mut r = self.respond(Status::Rejected);
        r.reason = Some(reason.to_string());
        r.detail = Some(detail.into());
        r
    }

    pub fn place(&mut self, height: f64) -> Response {
        let id = self.packer.arrivals();
        let outcome = self.packer.place(height);
        match outcome {
            PlacementOutcome::Placed(p) => {
                let mut r = self.respond(Status::Placed);
                r.id = Some(p.id);
                r.rect = Some(p.rect());
                r.class = Some(p.class);
                r.shelf_id = p.shelf_id;
                r
            }
            PlacementOutcome::Rejected { reason, detail } => {
                let mut r = self.reject(reason.as_str(), detail);
                r.id = Some(id);
                r
            }
        }
    }

    pub fn place_raw(&mut self, height: Option<&RawValue>) -> Response {
        let Some(raw) = height else {
            return self.reject("parse_error", "missing height");
        };
        match parse_json_height(raw) {
            Ok(h) => self.place(h),
            Err(msg) => self.reject("parse_error", msg),
        }
    }

    pub fn state(&mut self) -> Response {
        let mut r = self.respond(Status::Ok);
        r.snapshot = Some(Box::new(self.packer.snapshot()));
        r
    }

    pub fn reset(&mut self) -> Response {
        self.packer = Packer::new(self.config);
        self.respond(Status::Ok)
    }

    pub fn handle(&mut self, req: &Request<'_>) -> Response {
        match req.op.as_str() {
            "place" => self.place_raw(req.height),
            "state" => self.state(),
            "reset" => self.reset(),
            "undo" | "undo_unsupported" => {
                self.reject("unsupported", "placements are final; reset and replay instead")
            }
            other => self.reject("parse_error", format!("unknown op `{other}`")),
        }
    }

    /// Handles one newline-delimited JSON request.
    pub fn handle_line(&mut self, line: &str) -> Response {
        match serde_json::from_str::<Request<'_>>(line) {
            Ok(req) => self.handle(&req),
            Err(e) => self.reject("parse_error", e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn place_state_reset() {
        let mut s = Session::new(PackerConfig::default());
        let r = s.handle_line(r#"{"op":"place","height":0.3}"#);
        assert_eq!(r.status, Status::Placed);
        assert_eq!(r.rect, Some(Rect::new(0.7, 0.0, 0.3, 0.3)));
        assert_eq!(r.seq, 1);
        let st = s.handle_line(r#"{"op":"state"}"#);
        assert_eq!(st.seq, 2);
        assert_eq!(st.snapshot.unwrap().placements.len(), 1);
        let rs = s.handle_line(r#"{"op":"reset"}"#);
        assert_eq!((rs.seq, rs.cumulative_area), (3, 0.0));
    }

    #[test]
    fn bad_requests_leave_state_alone() {
        let mut s = Session::new(PackerConfig::default());
        s.place(0.3);
        let before = s.packer().snapshot();
        for line in [
            "not json",
            r#"{"op":"place"}"#,
            r#"{"op":"place","height":1e-3}"#,
            r#"{"op":"place","height":"abc"}"#,
            r#"{"op":"jump"}"#,
        ] {
            let r = s.handle_line(line);
            assert_eq!(r.status, Status::Rejected, "{line}");
            assert_eq!(r.reason.as_deref(), Some("parse_error"), "{line}");
        }
        assert_eq!(s.packer().snapshot(), before);
    }

    #[test]
    fn invalid_height_is_reported() {
        let mut s = Session::new(PackerConfig::default());
        let r = s.handle_line(r#"{"op":"place","height":2}"#);
        assert_eq!(r.reason.as_deref(), Some("invalid_height"));
        assert!(s.packer().placements().is_empty());
    }

    #[test]
    fn budget_meter() {
        let cfg = PackerConfig {
            enforce_budget: true,
            budget: 0.375,
        };
        let mut s = Session::new(cfg);
        let r = s.place(0.5);
        assert!((r.budget_remaining - 0.125).abs() < 1e-15);
        let r = s.place(0.4);
        assert_eq!(r.reason.as_deref(), Some("budget_exceeded"));
        assert_eq!(r.cumulative_area, 0.25);
    }
}
