//! Naive scalar reference for the per-pixel optimization.
//!
//! A deliberately plain transcription of the optimization, written against
//! bare `[f64; 3]` arrays with no shared code, shortcuts or reordering, so
//! the test suites can use it as an independent oracle for the production
//! path. Component order is `[luminance, a, b]`. Only compiled with the
//! `reference` feature; never used by the pipeline itself.

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: [f64; 3], k: f64) -> [f64; 3] {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm(sub(a, b))
}

/// Step-by-step scalar version of the optimizer. Same conventions as the
/// production path for every degenerate case:
///
/// - zero budget returns `d` untouched;
/// - background at the ball center returns `d` untouched;
/// - `d` at the ideal point yields a zero shift;
/// - achromatic `d` skips the chroma gate;
/// - a zero shift inside the JND sphere moves straight away from `b`
///   (`+a` axis when `d == b`);
/// - results outside the unit ball project radially onto it, sliding along
///   the sphere surface if the projection lands inside the JND sphere.
pub fn optimize_color_reference(
    d: [f64; 3],
    b: [f64; 3],
    lambda_e: f64,
    lambda_jnd: f64,
    epsilon: f64,
) -> [f64; 3] {
    if lambda_e == 0.0 {
        return d;
    }

    // Ideal point: farthest point of the unit ball from b.
    let b_len = norm(b);
    if b_len <= epsilon {
        return d;
    }
    let ideal = [-b[0] / b_len, -b[1] / b_len, -b[2] / b_len];

    // Color difference constraint.
    let to_ideal = sub(ideal, d);
    let to_ideal_len = norm(to_ideal);
    let e = if to_ideal_len <= epsilon {
        [0.0; 3]
    } else {
        scale(to_ideal, to_ideal_len.min(lambda_e) / to_ideal_len)
    };

    // Chroma constraint, in the chromatic plane.
    let e_planar = [0.0, e[1], e[2]];
    let d_planar = [0.0, d[1], d[2]];
    let d_planar_len = norm(d_planar);
    let dir_yz = if d_planar_len <= epsilon {
        e_planar
    } else {
        let e_ch = scale(
            d_planar,
            dot(e_planar, d_planar) / (d_planar_len * d_planar_len),
        );
        let e_h = sub(e_planar, e_ch);
        let cos_ch = dot(e_planar, d_planar); // sign decides the gate
        let t_ch = if cos_ch >= 0.0 { 1.0 } else { 0.0 };
        add(scale(e_ch, t_ch), e_h)
    };

    // Luminance constraint.
    let e_len = norm(e);
    let dir_x = if e_len == 0.0 {
        0.0
    } else {
        let cos_l = e[0] / e_len;
        (1.0 - cos_l.abs()) * e[0]
    };

    let mut p = [d[0] + dir_x, d[1] + dir_yz[1], d[2] + dir_yz[2]];

    // Just noticeable difference constraint.
    let r = lambda_jnd;
    if r > 0.0 && dist(p, b) < r {
        let line = sub(p, d);
        if norm(line) <= epsilon {
            let away = sub(d, b);
            let away_len = norm(away);
            if away_len <= epsilon {
                p = [b[0], b[1] + r, b[2]];
            } else {
                p = add(b, scale(away, r / away_len));
            }
        } else {
            // Larger root of |d + t·line - b|^2 = r^2.
            let m = sub(d, b);
            let a_q = dot(line, line);
            let b_q = 2.0 * dot(line, m);
            let c_q = dot(m, m) - r * r;
            let disc = (b_q * b_q - 4.0 * a_q * c_q).max(0.0);
            let t = (-b_q + disc.sqrt()) / (2.0 * a_q);
            p = add(d, scale(line, t));
        }
    }

    // Containment in the unit ball.
    if norm(p) > 1.0 {
        p = scale(p, 1.0 / norm(p));
        if r > 0.0 && dist(p, b) < r * (1.0 - 1e-12) {
            p = slide_to_jnd_circle(p, b, r, epsilon);
        }
    }
    p
}

/// Point of the unit sphere at distance exactly `r` from `b`, nearest to
/// the unit-sphere point `p`.
fn slide_to_jnd_circle(p: [f64; 3], b: [f64; 3], r: f64, epsilon: f64) -> [f64; 3] {
    let b_len = norm(b);
    if b_len <= epsilon {
        return p;
    }
    let c = (1.0 + b_len * b_len - r * r) / (2.0 * b_len);
    if c.abs() > 1.0 {
        return p;
    }
    let bhat = scale(b, 1.0 / b_len);
    let tangential = sub(p, scale(bhat, dot(p, bhat)));
    let t_len = norm(tangential);
    let tdir = if t_len <= epsilon {
        // Deterministic perpendicular: axis least aligned with bhat.
        let a = [bhat[0].abs(), bhat[1].abs(), bhat[2].abs()];
        let axis = if a[1] <= a[0] && a[1] <= a[2] {
            [0.0, 1.0, 0.0]
        } else if a[0] <= a[2] {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let ortho = sub(axis, scale(bhat, dot(axis, bhat)));
        scale(ortho, 1.0 / norm(ortho))
    } else {
        scale(tangential, 1.0 / t_len)
    };
    add(scale(bhat, c), scale(tdir, (1.0 - c * c).sqrt()))
}
