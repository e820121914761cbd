//! Quintic Hermite interpolation on one accepted step, using value, first
//! and second derivative at both ends.

#[derive(Debug, Clone, Copy)]
pub(crate) struct Quintic {
    x0: f64,
    h: f64,
    c: [f64; 6],
}

impl Quintic {
    pub(crate) fn new(x0: f64, y0: [f64; 3], x1: f64, y1: [f64; 3]) -> Self {
        let h = x1 - x0;
        let c0 = y0[0];
        let c1 = h * y0[1];
        let c2 = 0.5 * h * h * y0[2];
        let d = y1[0] - (c0 + c1 + c2);
        let dd = h * y1[1] - (c1 + 2.0 * c2);
        let ss = h * h * y1[2] - 2.0 * c2;
        let c3 = 10.0 * d - 4.0 * dd + 0.5 * ss;
        let c4 = -15.0 * d + 7.0 * dd - ss;
        let c5 = 6.0 * d - 3.0 * dd + 0.5 * ss;
        Quintic {
            x0,
            h,
            c: [c0, c1, c2, c3, c4, c5],
        }
    }

    /// Value, first and second derivative at `x`.
    pub(crate) fn eval(&self, x: f64) -> [f64; 3] {
        let s = (x - self.x0) / self.h;
        let c = &self.c;
        let p = c[0] + s * (c[1] + s * (c[2] + s * (c[3] + s * (c[4] + s * c[5]))));
        let dp = c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * (4.0 * c[4] + s * 5.0 * c[5])));
        let ddp = 2.0 * c[2] + s * (6.0 * c[3] + s * (12.0 * c[4] + s * 20.0 * c[5]));
        [p, dp / self.h, ddp / (self.h * self.h)]
    }
}
