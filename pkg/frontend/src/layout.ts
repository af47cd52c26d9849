/** Seeded force-directed layout; same seed, same positions, every run. */

export interface Point {
  x: number;
  y: number;
}

/** mulberry32: small deterministic PRNG, good enough for layout jitter. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  nodeIds: string[],
  edges: Array<{ src: string; dst: string }>,
  width: number,
  height: number,
  seed = 1,
  iterations = 250,
): Map<string, Point> {
  const n = nodeIds.length;
  const positions = new Map<string, Point>();
  if (n === 0) {
    return positions;
  }
  const rand = mulberry32(seed);
  const index = new Map(nodeIds.map((id, i) => [id, i]));
  const xs = new Array<number>(n);
  const ys = new Array<number>(n);
  for (let i = 0; i < n; i++) {
    xs[i] = width * (0.2 + 0.6 * rand());
    ys[i] = height * (0.2 + 0.6 * rand());
  }
  const links: Array<[number, number]> = [];
  for (const e of edges) {
    const a = index.get(e.src);
    const b = index.get(e.dst);
    if (a !== undefined && b !== undefined && a !== b) {
      links.push([a, b]);
    }
  }

  const area = width * height;
  const k = Math.sqrt(area / n) * 0.7;
  let temperature = Math.min(width, height) / 8;
  const cool = 0.96;

  for (let iter = 0; iter < iterations; iter++) {
    const dx = new Array<number>(n).fill(0);
    const dy = new Array<number>(n).fill(0);
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let vx = xs[i] - xs[j];
        let vy = ys[i] - ys[j];
        let d2 = vx * vx + vy * vy;
        if (d2 < 1e-6) {
          // deterministic nudge for coincident nodes
          vx = 0.01 * (i - j);
          vy = 0.01;
          d2 = vx * vx + vy * vy;
        }
        const repulse = (k * k) / d2;
        dx[i] += vx * repulse;
        dy[i] += vy * repulse;
        dx[j] -= vx * repulse;
        dy[j] -= vy * repulse;
      }
    }
    for (const [a, b] of links) {
      const vx = xs[a] - xs[b];
      const vy = ys[a] - ys[b];
      const d = Math.sqrt(vx * vx + vy * vy) || 1e-3;
      const attract = (d * d) / k / d;
      dx[a] -= vx * attract;
      dy[a] -= vy * attract;
      dx[b] += vx * attract;
      dy[b] += vy * attract;
    }
    for (let i = 0; i < n; i++) {
      // gentle pull to the canvas center keeps components on screen
      dx[i] += (width / 2 - xs[i]) * 0.02;
      dy[i] += (height / 2 - ys[i]) * 0.02;
      const d = Math.sqrt(dx[i] * dx[i] + dy[i] * dy[i]) || 1e-3;
      const step = Math.min(d, temperature);
      xs[i] += (dx[i] / d) * step;
      ys[i] += (dy[i] / d) * step;
      xs[i] = Math.max(30, Math.min(width - 30, xs[i]));
      ys[i] = Math.max(30, Math.min(height - 30, ys[i]));
    }
    temperature *= cool;
  }

  for (let i = 0; i < n; i++) {
    positions.set(nodeIds[i], {
      x: Math.round(xs[i] * 100) / 100,
      y: Math.round(ys[i] * 100) / 100,
    });
  }
  return positions;
}
