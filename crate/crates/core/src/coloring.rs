//! Explicit colorings of an integer interval `[1, N]`.
//!
//! The text file format accepted by [`Coloring::parse`]:
//!
//! ```text
//! # optional comment lines
//! N r
//! c1 c2 ... cN
//! ```
//!
//! where the colors of 1..N follow in order, whitespace/newline separated,
//! each in `0..r`.

use thiserror::Error;

/// Color index, in `0..r`.
pub type Color = u32;

/// An `r`-coloring of `[1, N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    num_colors: Color,
    colors: Vec<Color>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("coloring must cover at least the interval [1, 1]")]
    Empty,
    #[error("number of colors must be at least 1")]
    NoColors,
    #[error("entry for {value} has color {color}, outside 0..{num_colors}")]
    ColorOutOfRange {
        value: u64,
        color: Color,
        num_colors: Color,
    },
    #[error("value {value} is outside the colored interval [1, {n}]")]
    ValueOutOfRange { value: u64, n: u64 },
    #[error("coloring file, line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Coloring {
    /// Wraps an explicit color array; entry `i` colors the integer `i + 1`.
    pub fn new(num_colors: Color, colors: Vec<Color>) -> Result<Self, ColoringError> {
        if num_colors == 0 {
            return Err(ColoringError::NoColors);
        }
        if colors.is_empty() {
            return Err(ColoringError::Empty);
        }
        if let Some((i, &c)) = colors.iter().enumerate().find(|(_, &c)| c >= num_colors) {
            return Err(ColoringError::ColorOutOfRange {
                value: i as u64 + 1,
                color: c,
                num_colors,
            });
        }
        Ok(Coloring { num_colors, colors })
    }

    pub fn n(&self) -> u64 {
        self.colors.len() as u64
    }

    pub fn num_colors(&self) -> Color {
        self.num_colors
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn color_of(&self, value: u64) -> Result<Color, ColoringError> {
        if value == 0 || value > self.n() {
            return Err(ColoringError::ValueOutOfRange {
                value,
                n: self.n(),
            });
        }
        Ok(self.colors[value as usize - 1])
    }

    /// Returns the common color of `values` if they are all colored alike,
    /// `None` otherwise (including for an empty iterator). Every value must
    /// lie in `[1, n]`.
    pub fn is_monochromatic<'a>(
        &self,
        values: impl IntoIterator<Item = &'a u64>,
    ) -> Result<Option<Color>, ColoringError> {
        let mut common = None;
        for &value in values {
            let color = self.color_of(value)?;
            match common {
                None => common = Some(color),
                Some(c) if c != color => return Ok(None),
                Some(_) => {}
            }
        }
        Ok(common)
    }

    pub fn parse(text: &str) -> Result<Self, ColoringError> {
        let mut header: Option<(u64, Color)> = None;
        let mut colors: Vec<Color> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_number = lineno + 1;
            let content = line.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let mut fields = content.split_whitespace();
            if header.is_none() {
                let n: u64 = parse_field(fields.next(), line_number, "interval length N")?;
                let r: Color = parse_field(fields.next(), line_number, "color count r")?;
                if let Some(extra) = fields.next() {
                    return Err(ColoringError::Parse {
                        line: line_number,
                        message: format!("unexpected trailing field `{extra}` after `N r`"),
                    });
                }
                header = Some((n, r));
            } else {
                for field in fields {
                    let c: Color = parse_field(Some(field), line_number, "color entry")?;
                    colors.push(c);
                }
            }
        }
        let (n, r) = header.ok_or(ColoringError::Parse {
            line: 0,
            message: "missing `N r` header line".into(),
        })?;
        if colors.len() as u64 != n {
            return Err(ColoringError::Parse {
                line: 0,
                message: format!("expected {n} color entries, found {}", colors.len()),
            });
        }
        Coloring::new(r, colors)
    }

    /// Renders the coloring in the text file format.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.num_colors);
        for chunk in self.colors.chunks(20) {
            let line: Vec<String> = chunk.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_field<T: std::str::FromStr>(
    field: Option<&str>,
    line: usize,
    what: &str,
) -> Result<T, ColoringError> {
    let raw = field.ok_or_else(|| ColoringError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    raw.parse().map_err(|_| ColoringError::Parse {
        line,
        message: format!("invalid {what} `{raw}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parity_10() -> Coloring {
        // even -> 0, odd -> 1
        Coloring::new(2, (1..=10).map(|v| (v % 2) as Color).collect()).unwrap()
    }

    #[test]
    fn monochromatic_under_single_color() {
        let c = Coloring::new(1, vec![0; 10]).unwrap();
        assert_eq!(c.is_monochromatic(&[1, 2]).unwrap(), Some(0));
    }

    #[test]
    fn parity_classes() {
        let c = parity_10();
        assert_eq!(c.is_monochromatic(&[2, 4, 6]).unwrap(), Some(0));
        assert_eq!(c.is_monochromatic(&[1, 2]).unwrap(), None);
    }

    #[test]
    fn rejects_out_of_range_values() {
        let c = parity_10();
        assert_eq!(
            c.is_monochromatic(&[4, 11]),
            Err(ColoringError::ValueOutOfRange { value: 11, n: 10 })
        );
        assert!(c.color_of(0).is_err());
    }

    #[test]
    fn validates_entries() {
        assert!(matches!(
            Coloring::new(2, vec![0, 2, 1]),
            Err(ColoringError::ColorOutOfRange { value: 2, .. })
        ));
        assert!(matches!(Coloring::new(0, vec![0]), Err(ColoringError::NoColors)));
        assert!(matches!(Coloring::new(1, vec![]), Err(ColoringError::Empty)));
    }

    #[test]
    fn parses_file_format() {
        let text = "# parity on [1,6]\n6 2\n1 0 1\n0 1 0\n";
        let c = Coloring::parse(text).unwrap();
        assert_eq!(c.n(), 6);
        assert_eq!(c.num_colors(), 2);
        assert_eq!(c.colors(), &[1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn file_round_trip() {
        let c = parity_10();
        let text = c.to_file_string();
        assert_eq!(Coloring::parse(&text).unwrap(), c);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            Coloring::parse("3 2\n0 1 x\n"),
            Err(ColoringError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Coloring::parse("3 2\n0 1\n"),
            Err(ColoringError::Parse { .. })
        ));
        assert!(matches!(
            Coloring::parse("# nothing\n"),
            Err(ColoringError::Parse { .. })
        ));
    }
}
