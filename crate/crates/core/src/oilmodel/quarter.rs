use std::fmt;
use std::str::FromStr;

/// Calendar quarter of the modeled window (1989 history plus the 1990 forecast year).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarterTag {
    pub year: u16,
    pub quarter: u8,
}

pub const FIRST_YEAR: u16 = 1989;
pub const FORECAST_YEAR: u16 = 1990;

impl QuarterTag {
    pub const fn new(year: u16, quarter: u8) -> Self {
        QuarterTag { year, quarter }
    }

    pub const fn forecast(quarter: u8) -> Self {
        QuarterTag::new(FORECAST_YEAR, quarter)
    }

    /// The eight modeled quarters in order.
    pub fn all() -> [QuarterTag; 8] {
        let mut out = [QuarterTag::new(FIRST_YEAR, 1); 8];
        for (i, q) in out.iter_mut().enumerate() {
            *q = QuarterTag::new(FIRST_YEAR + (i / 4) as u16, (i % 4) as u8 + 1);
        }
        out
    }

    pub fn history() -> [QuarterTag; 4] {
        [1, 2, 3, 4].map(|q| QuarterTag::new(FIRST_YEAR, q))
    }

    pub fn forecasts() -> [QuarterTag; 4] {
        [1, 2, 3, 4].map(QuarterTag::forecast)
    }

    pub fn is_history(&self) -> bool {
        self.year == FIRST_YEAR
    }

    /// Zero-based position in the modeled window (89Q1 = 0).
    pub fn ordinal(&self) -> i32 {
        (i32::from(self.year) - i32::from(FIRST_YEAR)) * 4 + i32::from(self.quarter) - 1
    }

    fn from_ordinal(o: i32) -> Option<QuarterTag> {
        if !(0..8).contains(&o) {
            return None;
        }
        Some(QuarterTag::new(FIRST_YEAR + (o / 4) as u16, (o % 4) as u8 + 1))
    }

    /// The quarter `k` steps earlier, if it is inside the modeled window.
    pub fn lag(&self, k: u8) -> Option<QuarterTag> {
        QuarterTag::from_ordinal(self.ordinal() - i32::from(k))
    }

    /// Node-id suffix: `d c b a` for 1989 Q1..Q4, `1 2 3 4` for 1990.
    pub fn suffix(&self) -> &'static str {
        match (self.is_history(), self.quarter) {
            (true, 1) => "d",
            (true, 2) => "c",
            (true, 3) => "b",
            (true, _) => "a",
            (false, 1) => "1",
            (false, 2) => "2",
            (false, 3) => "3",
            (false, _) => "4",
        }
    }

    pub fn from_suffix(s: &str) -> Option<QuarterTag> {
        let q = match s {
            "d" => QuarterTag::new(FIRST_YEAR, 1),
            "c" => QuarterTag::new(FIRST_YEAR, 2),
            "b" => QuarterTag::new(FIRST_YEAR, 3),
            "a" => QuarterTag::new(FIRST_YEAR, 4),
            "1" | "2" | "3" | "4" => QuarterTag::forecast(s.as_bytes()[0] - b'0'),
            _ => return None,
        };
        Some(q)
    }

    /// `"<prefix>.<suffix>"`, e.g. `WTI.3` or `CoreProd.a`.
    pub fn node(&self, prefix: &str) -> String {
        format!("{prefix}.{}", self.suffix())
    }

    /// Period label, e.g. `90Q3`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for QuarterTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}Q{}", self.year % 100, self.quarter)
    }
}

impl FromStr for QuarterTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("`{s}` is not a quarter label like 90Q1");
        let (yy, q) = s.split_once('Q').ok_or_else(bad)?;
        let yy: u16 = yy.parse().map_err(|_| bad())?;
        let q: u8 = q.parse().map_err(|_| bad())?;
        let tag = QuarterTag::new(1900 + yy, q);
        if yy > 99 || !(1..=4).contains(&q) || QuarterTag::from_ordinal(tag.ordinal()) != Some(tag) {
            return Err(bad());
        }
        Ok(tag)
    }
}

/// Period labels for network metadata, oldest first.
pub fn period_labels() -> Vec<String> {
    QuarterTag::all().iter().map(QuarterTag::label).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_strictly_ordered_periods() {
        let all = QuarterTag::all();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all.map(|q| q.suffix()), ["d", "c", "b", "a", "1", "2", "3", "4"]);
        assert_eq!(period_labels()[0], "89Q1");
        assert_eq!(period_labels()[7], "90Q4");
    }

    #[test]
    fn lags_cross_the_year_boundary() {
        let q1 = QuarterTag::forecast(1);
        assert_eq!(q1.lag(1).unwrap().suffix(), "a");
        assert_eq!(q1.lag(4).unwrap().suffix(), "d");
        assert_eq!(q1.lag(5), None);
        assert_eq!(QuarterTag::forecast(4).lag(4).unwrap().suffix(), "a");
    }

    #[test]
    fn labels_round_trip() {
        for q in QuarterTag::all() {
            assert_eq!(q.label().parse::<QuarterTag>().unwrap(), q);
            assert_eq!(QuarterTag::from_suffix(q.suffix()), Some(q));
        }
        assert!("91Q1".parse::<QuarterTag>().is_err());
        assert!("90Q5".parse::<QuarterTag>().is_err());
        assert!("garbage".parse::<QuarterTag>().is_err());
        assert_eq!(QuarterTag::forecast(3).node("WTI"), "WTI.3");
    }
}
