//! Event-series container and its on-disk formats.
//!
//! A series can live on disk as CSV with header `arrival_time` (strictly
//! increasing positive floats) or `interarrival` (positive floats), or as
//! JSONL with one `{"t": <arrival>}` object per event. Lines starting with
//! `#` are metadata/comments. Writers emit floats with 17 significant digits
//! so values round-trip exactly.
//!
//! Heavy-tailed data can span more orders of magnitude than f64 addition
//! resolves, in which case cumulative arrival times collide while the gaps
//! themselves are perfectly representable. The gap list is therefore the
//! primary representation everywhere estimation is involved, and readers hand
//! back raw values plus their origin instead of forcing the arrival form.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOrigin {
    Arrival,
    Interarrival,
}

/// Ordered arrival times of one realization, with the interarrival gaps they
/// came from (or that they imply).
#[derive(Debug, Clone, PartialEq)]
pub struct EventSeries {
    arrivals: Vec<f64>,
    gaps: Vec<f64>,
    origin: SeriesOrigin,
}

impl EventSeries {
    /// Build from strictly increasing positive arrival times.
    pub fn from_arrivals(arrivals: Vec<f64>) -> Result<Self> {
        let mut prev = 0.0;
        for (i, &a) in arrivals.iter().enumerate() {
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::DataAt {
                    msg: format!("arrival time {a} is not positive and finite"),
                    index: i,
                });
            }
            if a <= prev {
                return Err(Error::DataAt {
                    msg: format!("arrival time {a} does not increase past {prev}"),
                    index: i,
                });
            }
            prev = a;
        }
        let mut gaps = Vec::with_capacity(arrivals.len());
        let mut last = 0.0;
        for &a in &arrivals {
            gaps.push(a - last);
            last = a;
        }
        Ok(EventSeries {
            arrivals,
            gaps,
            origin: SeriesOrigin::Arrival,
        })
    }

    /// Build from positive interarrival gaps. The original gaps are retained
    /// exactly; the arrival times are their running sums.
    pub fn from_interarrivals(gaps: Vec<f64>) -> Result<Self> {
        for (i, &g) in gaps.iter().enumerate() {
            if !g.is_finite() || g <= 0.0 {
                return Err(Error::DataAt {
                    msg: format!("interarrival {g} is not positive and finite"),
                    index: i,
                });
            }
        }
        let mut arrivals = Vec::with_capacity(gaps.len());
        let mut sum = 0.0;
        for (i, &g) in gaps.iter().enumerate() {
            let next = sum + g;
            if next <= sum {
                return Err(Error::DataAt {
                    msg: format!(
                        "gap {g} vanishes against running sum {sum} in f64; \
                         keep this series in interarrival form"
                    ),
                    index: i,
                });
            }
            sum = next;
            arrivals.push(sum);
        }
        Ok(EventSeries {
            arrivals,
            gaps,
            origin: SeriesOrigin::Interarrival,
        })
    }

    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    pub fn interarrivals(&self) -> &[f64] {
        &self.gaps
    }

    pub fn origin(&self) -> SeriesOrigin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }
}

/// Raw values read from disk, before arrival-form validation.
#[derive(Debug, Clone)]
pub struct RawSeries {
    pub values: Vec<f64>,
    pub origin: SeriesOrigin,
}

impl RawSeries {
    /// Interarrival gaps, differencing arrival input first.
    pub fn into_gaps(self) -> Result<Vec<f64>> {
        match self.origin {
            SeriesOrigin::Interarrival => {
                for (i, &g) in self.values.iter().enumerate() {
                    if !g.is_finite() || g <= 0.0 {
                        return Err(Error::DataAt {
                            msg: format!("interarrival {g} is not positive and finite"),
                            index: i,
                        });
                    }
                }
                Ok(self.values)
            }
            SeriesOrigin::Arrival => {
                let series = EventSeries::from_arrivals(self.values)?;
                Ok(series.gaps)
            }
        }
    }
}

pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn meta_line(meta: &[(&str, String)]) -> String {
    let body: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {}", body.join(" "))
}

/// Write values as single-column CSV with the header implied by `repr`.
pub fn write_csv<W: Write>(
    mut w: W,
    values: &[f64],
    repr: SeriesOrigin,
    meta: &[(&str, String)],
) -> std::io::Result<()> {
    if !meta.is_empty() {
        writeln!(w, "{}", meta_line(meta))?;
    }
    let header = match repr {
        SeriesOrigin::Arrival => "arrival_time",
        SeriesOrigin::Interarrival => "interarrival",
    };
    writeln!(w, "{header}")?;
    for &v in values {
        writeln!(w, "{}", fmt17(v))?;
    }
    Ok(())
}

/// Write arrival times as JSONL, one `{"t": ...}` object per event.
pub fn write_jsonl<W: Write>(
    mut w: W,
    arrivals: &[f64],
    meta: &[(&str, String)],
) -> std::io::Result<()> {
    let meta_obj: serde_json::Map<String, serde_json::Value> = meta
        .iter()
        .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.clone())))
        .collect();
    writeln!(w, "{}", serde_json::json!({ "meta": meta_obj }))?;
    for &t in arrivals {
        writeln!(w, "{{\"t\": {}}}", fmt17(t))?;
    }
    Ok(())
}

/// Read a series in either on-disk format, detecting which one by content.
pub fn read_series<R: BufRead>(r: R) -> Result<RawSeries> {
    let mut values = Vec::new();
    let mut origin: Option<SeriesOrigin> = None;
    let mut jsonl = false;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if origin.is_none() && !jsonl {
            if trimmed.starts_with('{') {
                jsonl = true;
                origin = Some(SeriesOrigin::Arrival);
            } else {
                origin = Some(match trimmed {
                    "arrival_time" => SeriesOrigin::Arrival,
                    "interarrival" => SeriesOrigin::Interarrival,
                    other => {
                        return Err(Error::Parse {
                            line: lineno,
                            msg: format!(
                                "expected header 'arrival_time' or 'interarrival', got '{other}'"
                            ),
                        });
                    }
                });
                continue;
            }
        }
        if jsonl {
            let obj: serde_json::Value =
                serde_json::from_str(trimmed).map_err(|e| Error::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
            if obj.get("meta").is_some() {
                continue;
            }
            let t = obj.get("t").and_then(|v| v.as_f64()).ok_or(Error::Parse {
                line: lineno,
                msg: "expected an object with a numeric 't' field".to_string(),
            })?;
            values.push(t);
        } else {
            let v: f64 = trimmed.parse().map_err(|e| Error::Parse {
                line: lineno,
                msg: format!("bad float '{trimmed}': {e}"),
            })?;
            values.push(v);
        }
    }
    let origin = origin.ok_or(Error::Data("empty series input".to_string()))?;
    Ok(RawSeries { values, origin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    #[test]
    fn arrival_validation() {
        assert!(EventSeries::from_arrivals(vec![1.0, 2.0, 3.0]).is_ok());
        assert!(EventSeries::from_arrivals(vec![]).is_ok());
        match EventSeries::from_arrivals(vec![1.0, 1.0]) {
            Err(Error::DataAt { index: 1, .. }) => {}
            other => panic!("expected DataAt index 1, got {other:?}"),
        }
        match EventSeries::from_arrivals(vec![-1.0]) {
            Err(Error::DataAt { index: 0, .. }) => {}
            other => panic!("expected DataAt index 0, got {other:?}"),
        }
    }

    #[test]
    fn interarrival_validation() {
        let s = EventSeries::from_interarrivals(vec![0.5, 0.25, 2.0]).unwrap();
        assert_eq!(s.arrivals(), &[0.5, 0.75, 2.75]);
        assert_eq!(s.interarrivals(), &[0.5, 0.25, 2.0]);
        assert!(matches!(
            EventSeries::from_interarrivals(vec![0.5, 0.0]),
            Err(Error::DataAt { index: 1, .. })
        ));
        // a gap below the running sum's resolution must be rejected, not folded
        assert!(matches!(
            EventSeries::from_interarrivals(vec![1e17, 1e-3]),
            Err(Error::DataAt { index: 1, .. })
        ));
    }

    #[test]
    fn csv_roundtrip_with_meta() {
        let gaps = vec![0.125, 3.5e-7, 42.0];
        let mut buf = Vec::new();
        write_csv(
            &mut buf,
            &gaps,
            SeriesOrigin::Interarrival,
            &[("seed", "7".to_string())],
        )
        .unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed=7\ninterarrival\n"));
        let raw = read_series(Cursor::new(buf)).unwrap();
        assert_eq!(raw.origin, SeriesOrigin::Interarrival);
        assert_eq!(raw.values, gaps);
    }

    #[test]
    fn jsonl_roundtrip() {
        let arrivals = vec![0.25, 1.0, 7.75];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &arrivals, &[("nu", "0.5".to_string())]).unwrap();
        let raw = read_series(Cursor::new(buf)).unwrap();
        assert_eq!(raw.origin, SeriesOrigin::Arrival);
        assert_eq!(raw.values, arrivals);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let input = "# meta\narrival_time\n1.0\nnot_a_number\n";
        match read_series(Cursor::new(input)) {
            Err(Error::Parse { line: 4, .. }) => {}
            other => panic!("expected parse error on line 4, got {other:?}"),
        }
        let input = "wrong_header\n1.0\n";
        assert!(matches!(
            read_series(Cursor::new(input)),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn into_gaps_differences_arrivals() {
        let raw = RawSeries {
            values: vec![1.0, 1.5, 4.0],
            origin: SeriesOrigin::Arrival,
        };
        assert_eq!(raw.into_gaps().unwrap(), vec![1.0, 0.5, 2.5]);
    }

    proptest! {
        #[test]
        fn prop_csv_roundtrip_bitwise(gaps in prop::collection::vec(1e-12f64..1e12, 0..50)) {
            let mut buf = Vec::new();
            write_csv(&mut buf, &gaps, SeriesOrigin::Interarrival, &[]).unwrap();
            let raw = read_series(Cursor::new(buf)).unwrap();
            prop_assert_eq!(raw.values, gaps);
        }
    }
}
