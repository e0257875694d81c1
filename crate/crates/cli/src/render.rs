//! SVG rendering of a packer snapshot.

use svg::node::element::{Group, Rectangle, Text, Title};
use svg::Document;

use squarepack::shelf::Orientation;
use squarepack::{Rect, Snapshot, SizeClass};

const SCALE: f64 = 1000.0;
const MARGIN: f64 = 10.0;

fn fill(class: SizeClass) -> &'static str {
    match class {
        SizeClass::Large => "#c0392b",
        SizeClass::Medium => "#e67e22",
        SizeClass::Sub(0) => "#2e86c1",
        SizeClass::Sub(1) => "#17a589",
        SizeClass::Sub(2) => "#28b463",
        SizeClass::Sub(3) => "#7d3c98",
        SizeClass::Sub(_) => "#839192",
    }
}

/// Unit-square rect in SVG user space (y axis flipped).
fn rect(r: &Rect) -> Rectangle {
    Rectangle::new()
        .set("x", MARGIN + r.x * SCALE)
        .set("y", MARGIN + (1.0 - r.top()) * SCALE)
        .set("width", r.w * SCALE)
        .set("height", r.h * SCALE)
}

pub fn render(snap: &Snapshot) -> Document {
    let size = SCALE + 2.0 * MARGIN;
    let mut shelves = Group::new()
        .set("fill", "none")
        .set("stroke", "#555")
        .set("stroke-width", 1);
    for s in &snap.shelves {
        let dash = match s.orientation {
            Orientation::Horizontal => "none",
            Orientation::Vertical => "4 3",
        };
        shelves = shelves.add(
            rect(&s.rect)
                .set("stroke-dasharray", dash)
                .add(Title::new(format!("{} ({:?}, used {:.6})", s.label, s.state, s.used))),
        );
        if s.orientation == Orientation::Horizontal && s.rect.w > 0.05 {
            shelves = shelves.add(
                Text::new(s.label.clone())
                    .set("x", MARGIN + s.rect.x * SCALE + 4.0)
                    .set("y", MARGIN + (1.0 - s.rect.top()) * SCALE + 14.0)
                    .set("font-size", 12)
                    .set("fill", "#555")
                    .set("stroke", "none"),
            );
        }
    }
    let mut squares = Group::new()
        .set("stroke", "#222")
        .set("stroke-width", 0.5)
        .set("fill-opacity", 0.8);
    for p in &snap.placements {
        squares = squares.add(
            rect(&p.rect())
                .set("fill", fill(p.class))
                .add(Title::new(format!("#{} {} h={}", p.id, p.class.label(), p.height))),
        );
    }
    Document::new()
        .set("viewBox", (0, 0, size, size))
        .set("width", size)
        .set("height", size)
        .add(
            rect(&Rect::UNIT)
                .set("fill", "white")
                .set("stroke", "black")
                .set("stroke-width", 2),
        )
        .add(shelves)
        .add(squares)
}
