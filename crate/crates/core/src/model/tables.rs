//! Transcribed and reconstructed probability tables.

use super::catalog::Coating;

pub type Column = [f64; 6];

fn point(bin: usize) -> Column {
    let mut c = [0.0; 6];
    c[bin] = 1.0;
    c
}

fn split(a: usize, pa: f64, b: usize, pb: f64) -> Column {
    let mut c = [0.0; 6];
    c[a] = pa;
    c[b] = pb;
    c
}

/// Average NSTM distribution for one coating, years since coating (0..=4)
/// and number of cleanings per season (0, 2, 6 or 12, by index).
pub fn biofouling_avg(coating: Coating, time: usize, iwc: usize) -> Column {
    use Coating::*;
    match (iwc, coating) {
        (_, FoulingRelease) | (3, _) => point(0),
        (0, Hard) => point(if time == 0 { 0 } else { 5 }),
        (0, Biocidal) => point([0, 0, 1, 4, 5][time]),
        (1, Hard) => match time {
            0 => point(0),
            1 => split(3, 0.5, 4, 0.5),
            _ => point(5),
        },
        (1, Biocidal) => point([0, 0, 0, 1, 1][time]),
        (2, Hard) => match time {
            0 => point(0),
            1 | 2 => point(1),
            3 => split(1, 0.5, 2, 0.5),
            _ => split(1, 0.4, 2, 0.6),
        },
        (2, Biocidal) => point(0),
        _ => unreachable!("cleaning index out of range"),
    }
}

/// Whether the average column was inferred rather than transcribed.
pub fn biofouling_avg_reconstructed(coating: Coating, time: usize, iwc: usize) -> bool {
    coating == Coating::Hard && time == 4 && iwc == 2
}

fn max_anchor(coating: Coating, time: usize, iwc: usize) -> Option<Column> {
    use Coating::*;
    match (iwc, coating) {
        (_, FoulingRelease) | (3, _) => Some(point(0)),
        (0, Hard) => Some(point(if time == 0 { 0 } else { 5 })),
        (0, Biocidal) => Some(point([0, 0, 2, 5, 5][time])),
        (1, _) if time == 0 => Some(point(0)),
        (1, Hard) if time == 1 => Some(point(5)),
        _ => None,
    }
}

/// Maximum NSTM distribution: anchored columns where printed, otherwise the
/// average column shifted one interval up (the clean and top intervals stay).
pub fn biofouling_max(coating: Coating, time: usize, iwc: usize) -> Column {
    if let Some(c) = max_anchor(coating, time, iwc) {
        return c;
    }
    let avg = biofouling_avg(coating, time, iwc);
    let mut c = [0.0; 6];
    c[0] = avg[0];
    for b in 1..5 {
        c[b + 1] += avg[b];
    }
    c[5] += avg[5];
    c
}

pub fn biofouling_max_reconstructed(coating: Coating, time: usize, iwc: usize) -> bool {
    max_anchor(coating, time, iwc).is_none()
}

/// Wetted-surface-area distribution per ship type, in ship-type order.
pub fn wsa_rows() -> [[f64; 12]; 6] {
    let fill = |head: &[f64], tail: f64| {
        let mut r = [tail; 12];
        r[..head.len()].copy_from_slice(head);
        r
    };
    [
        fill(&[1.58873e-4, 0.00301329, 0.34364, 0.403583, 0.248493], 1.58873e-4),
        fill(&[5.88568e-5, 5.88568e-5, 0.555222, 0.370168, 0.0740806], 5.88568e-5),
        [
            0.0106709, 0.0319514, 0.916743, 0.039106, 2.14085e-4, 3.97537e-4, 2.14085e-4, 3.06324e-5, 2.14085e-4,
            2.14085e-4, 3.06324e-5, 2.14085e-4,
        ],
        fill(&[0.112046, 0.00610589, 0.677391, 0.184323, 0.0189771], 1.65322e-4),
        fill(&[5.09397e-4, 0.00286012, 0.442681, 0.5534, 2.74324e-4], 3.92517e-5),
        fill(&[0.0560839, 0.283236, 0.51303, 0.131625, 0.0154078], 8.82073e-5),
    ]
}

/// Fouling type given the maximum NSTM interval: soft up to 30, an even
/// split on 30-40, hard above.
pub fn fouling_type(max_bin: usize) -> [f64; 2] {
    match max_bin {
        0..=2 => [1.0, 0.0],
        3 => [0.5, 0.5],
        _ => [0.0, 1.0],
    }
}
