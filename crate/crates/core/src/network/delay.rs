//! Circular delay buffers and parameter ramps.

/// Circular buffer indexed by "pushes ago": `read(1)` is the newest sample.
#[derive(Debug, Clone)]
pub struct DelayLine {
    buf: Vec<f64>,
    head: usize,
}

impl DelayLine {
    pub fn new(capacity: usize) -> Self {
        DelayLine {
            buf: vec![0.0; capacity.max(1)],
            head: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.buf.len()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.buf[self.head] = x;
        self.head += 1;
        if self.head == self.buf.len() {
            self.head = 0;
        }
    }

    /// Sample pushed `ago` pushes back, `1 <= ago <= capacity`.
    #[inline]
    pub fn read(&self, ago: usize) -> f64 {
        debug_assert!(ago >= 1 && ago <= self.buf.len());
        let cap = self.buf.len();
        self.buf[(self.head + cap - ago) % cap]
    }

    /// Linearly interpolated read at a fractional distance `ago >= 1`.
    #[inline]
    pub fn read_frac(&self, ago: f64) -> f64 {
        let lo = ago.floor();
        let frac = ago - lo;
        let lo = lo as usize;
        if frac == 0.0 {
            self.read(lo)
        } else {
            let a = self.read(lo);
            let b = self.read(lo + 1);
            a + frac * (b - a)
        }
    }

    pub fn clear(&mut self) {
        self.buf.iter_mut().for_each(|x| *x = 0.0);
        self.head = 0;
    }

    /// Grow the buffer, keeping the pushed history.
    pub fn ensure_capacity(&mut self, capacity: usize) {
        let cap = self.buf.len();
        if capacity <= cap {
            return;
        }
        let mut buf = vec![0.0; capacity];
        for ago in 1..=cap {
            buf[cap - ago] = self.read(ago);
        }
        self.buf = buf;
        self.head = cap;
    }
}

/// A parameter that can glide linearly to a new target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ramp {
    value: f64,
    target: f64,
    step: f64,
    remaining: u32,
}

impl Ramp {
    pub fn fixed(value: f64) -> Self {
        Ramp {
            value,
            target: value,
            step: 0.0,
            remaining: 0,
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    #[inline]
    pub fn is_settled(&self) -> bool {
        self.remaining == 0
    }

    /// Start a glide of `len` ticks toward `target`; a no-op when already there.
    pub fn retarget(&mut self, target: f64, len: u32) {
        if target == self.target && (self.remaining == 0 || target == self.value) {
            return;
        }
        if len == 0 {
            *self = Ramp::fixed(target);
            return;
        }
        self.target = target;
        self.step = (target - self.value) / len as f64;
        self.remaining = len;
    }

    #[inline]
    pub fn advance(&mut self) {
        if self.remaining > 0 {
            self.remaining -= 1;
            if self.remaining == 0 {
                self.value = self.target;
            } else {
                self.value += self.step;
            }
        }
    }

    /// Largest value the ramp takes until it settles.
    pub fn max_value(&self) -> f64 {
        self.value.max(self.target)
    }
}
