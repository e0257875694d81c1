//! JSON-lines records written by `pack`.

use serde::Serialize;
use squarepack::{PlacementOutcome, RejectReason, ShelfId, SizeClass};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Record {
    Placed {
        id: usize,
        height: f64,
        class: SizeClass,
        x: f64,
        y: f64,
        shelf_id: Option<ShelfId>,
    },
    Rejected {
        id: usize,
        height: f64,
        status: &'static str,
        reason: RejectReason,
        detail: String,
    },
}

impl Record {
    pub fn new(id: usize, height: f64, outcome: &PlacementOutcome) -> Record {
        match outcome {
            PlacementOutcome::Placed(p) => Record::Placed {
                id: p.id,
                height: p.height,
                class: p.class,
                x: p.x,
                y: p.y,
                shelf_id: p.shelf_id,
            },
            PlacementOutcome::Rejected { reason, detail } => Record::Rejected {
                id,
                height,
                status: "rejected",
                reason: *reason,
                detail: detail.clone(),
            },
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("records serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use squarepack::Packer;

    #[test]
    fn placement_schema() {
        let mut p = Packer::default();
        let out = p.place(0.6);
        let line = Record::new(0, 0.6, &out).to_line();
        assert_eq!(
            line,
            "{\"id\":0,\"height\":0.6,\"class\":\"large\",\"x\":0.4,\"y\":0.4,\"shelf_id\":null}\n"
        );
    }

    #[test]
    fn rejection_schema() {
        let mut p = Packer::default();
        p.place(0.51);
        let out = p.place(0.51);
        let v: serde_json::Value = serde_json::from_str(&Record::new(1, 0.51, &out).to_line()).unwrap();
        assert_eq!(v["status"], "rejected");
        assert_eq!(v["reason"], "no_fit");
        assert_eq!(v["id"], 1);
    }
}
