use super::Circuit;
use crate::qudit::GateKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AsciiStyle {
    #[default]
    Unicode,
    Plain,
}

struct Glyphs {
    wire: char,
    control: char,
    cx_target: char,
    crossing: char,
}

impl AsciiStyle {
    fn glyphs(self) -> Glyphs {
        match self {
            AsciiStyle::Unicode => Glyphs {
                wire: '─',
                control: '●',
                cx_target: '⊕',
                crossing: '┼',
            },
            AsciiStyle::Plain => Glyphs {
                wire: '-',
                control: '*',
                cx_target: '+',
                crossing: '|',
            },
        }
    }
}

/// Draws one row per wire with one column per gate, time running left to
/// right. Daggered gates carry a `'` after their symbol.
pub fn render_ascii(circuit: &Circuit, style: AsciiStyle) -> String {
    let g = style.glyphs();
    let label_width = format!("q{}", circuit.wires().saturating_sub(1)).len();
    let mut rows: Vec<String> = (0..circuit.wires())
        .map(|w| format!("{:<width$} {}", format!("q{w}"), g.wire, width = label_width))
        .collect();

    for gate in circuit.gates() {
        let lo = *gate.wires.iter().min().unwrap();
        let hi = *gate.wires.iter().max().unwrap();
        for (w, row) in rows.iter_mut().enumerate() {
            let (symbol, marked) = if gate.wires.len() == 2 && w == gate.wires[0] {
                (g.control, false)
            } else if w == gate.target() {
                let symbol = match gate.kind {
                    GateKind::CX => g.cx_target,
                    GateKind::CZ | GateKind::Z => 'Z',
                    GateKind::H => 'H',
                    GateKind::X => 'X',
                };
                (symbol, gate.dagger)
            } else if w > lo && w < hi {
                (g.crossing, false)
            } else {
                (g.wire, false)
            };
            row.push(g.wire);
            row.push(symbol);
            row.push(if marked { '\'' } else { g.wire });
            row.push(g.wire);
        }
    }

    let mut out = rows.join("\n");
    out.push('\n');
    out
}
