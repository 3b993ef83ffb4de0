use serde::Serialize;

use super::EngineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePolicy {
    /// Partial tiles at the bottom/right read zeros past the input and are cropped on output.
    ZeroPadPartial,
}

/// How a stride-1 output plane is cut into `M × M` tiles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TilingPlan {
    pub tile_in: usize,
    pub tile_out: usize,
    pub tiles_h: usize,
    pub tiles_w: usize,
    pub out_h: usize,
    pub out_w: usize,
    pub padding: usize,
    pub edge_policy: EdgePolicy,
}

impl TilingPlan {
    /// Plan for an `h × w` input (before padding) and an `r × r` kernel.
    pub fn new(m: usize, r: usize, h: usize, w: usize, padding: usize) -> Result<Self, EngineError> {
        let (ph, pw) = (h + 2 * padding, w + 2 * padding);
        if m == 0 || r == 0 || ph < r || pw < r {
            return Err(EngineError::Shape(format!("{r}x{r} kernel does not fit a {ph}x{pw} padded input")));
        }
        let (out_h, out_w) = (ph - r + 1, pw - r + 1);
        Ok(TilingPlan {
            tile_in: m + r - 1,
            tile_out: m,
            tiles_h: out_h.div_ceil(m),
            tiles_w: out_w.div_ceil(m),
            out_h,
            out_w,
            padding,
            edge_policy: EdgePolicy::ZeroPadPartial,
        })
    }

    pub fn tiles(&self) -> usize {
        self.tiles_h * self.tiles_w
    }

    /// Copies input tile `idx` of an unpadded `h × w` plane into `out` (`tile_in²`),
    /// with zeros for padding and for reads past the edge.
    pub fn gather(&self, plane: &[f64], h: usize, w: usize, idx: usize, out: &mut [f64]) {
        let (ty, tx) = (idx / self.tiles_w, idx % self.tiles_w);
        let n = self.tile_in;
        let (y0, x0) = ((ty * self.tile_out) as isize - self.padding as isize, (tx * self.tile_out) as isize - self.padding as isize);
        for i in 0..n {
            let y = y0 + i as isize;
            for j in 0..n {
                let x = x0 + j as isize;
                out[i * n + j] = if y >= 0 && x >= 0 && (y as usize) < h && (x as usize) < w {
                    plane[y as usize * w + x as usize]
                } else {
                    0.0
                };
            }
        }
    }

    /// Writes output tile `idx` (`tile_out²`, already scaled) into an `out_h × out_w` plane, cropping.
    pub fn scatter(&self, tile: &[f64], idx: usize, plane: &mut [f64]) {
        let (ty, tx) = (idx / self.tiles_w, idx % self.tiles_w);
        let m = self.tile_out;
        for i in 0..m {
            let y = ty * m + i;
            if y >= self.out_h {
                break;
            }
            for j in 0..m {
                let x = tx * m + j;
                if x >= self.out_w {
                    break;
                }
                plane[y * self.out_w + x] = tile[i * m + j];
            }
        }
    }
}
