//! Plot-data emission: named (x, y) series as CSV with header `x,y,series`.

use std::io::{self, Write};
use std::path::Path;

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

pub fn write_plot_csv(path: &Path, series: &[Series]) -> io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "x,y,series")?;
    for s in series {
        for (x, y) in &s.points {
            writeln!(file, "{x},{y},{}", s.name)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_writes_header_only() {
        let dir = std::env::temp_dir().join("wps_plot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("empty.csv");
        write_plot_csv(&path, &[]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x,y,series\n");
    }

    #[test]
    fn round_trips_through_parse() {
        let dir = std::env::temp_dir().join("wps_plot_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("series.csv");
        let series = vec![Series {
            name: "trend".into(),
            points: vec![(2.0, 0.34), (3.0, 0.22)],
        }];
        write_plot_csv(&path, &series).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,series"));
        let parsed: Vec<(f64, f64, String)> = lines
            .map(|l| {
                let mut it = l.split(',');
                (
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().parse().unwrap(),
                    it.next().unwrap().to_string(),
                )
            })
            .collect();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0], (2.0, 0.34, "trend".to_string()));
    }
}
