use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// Fixed 8-decimal reals; scientific notation outside `[1e-4, 1e15)`.
pub fn real(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x:.8}")
    } else {
        format!("{x:.8e}")
    }
}

/// Sample sizes: plain integers while exact, otherwise scientific.
pub fn size(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 9e15 {
        format!("{}", n as i64)
    } else {
        format!("{n:e}")
    }
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// A CSV table with a header row.
pub trait Record {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn csv_string<R: Record>(rows: &[R]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn json_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(real(0.58694674), "0.58694674");
        assert_eq!(real(0.0), "0.00000000");
        assert_eq!(real(6.0e-6), "6.00000000e-6");
        assert_eq!(size(1000.0), "1000");
        assert_eq!(size(1e50), "1e50");
        assert_eq!("6.00000000e-6".parse::<f64>().unwrap(), 6.0e-6);
    }
}
