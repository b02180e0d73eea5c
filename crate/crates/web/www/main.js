import init, { compareRooms, echoDensity, scatteringMatrix } from "./pkg/sdn_web.js";

const $ = (id) => document.getElementById(id);
const COLORS = ["#1f5fbf", "#2e8b57", "#8a2be2", "#b22222", "#555", "#daa520"];
let lastResponse = null;

function params() {
  const f = new FormData($("scene"));
  const vec = (k) => [0, 1, 2].map((i) => Number(f.get(k + i)));
  return {
    room: vec("room"),
    source: vec("source"),
    mic: vec("mic"),
    alpha: Number(f.get("alpha")),
    matrix: f.get("matrix"),
    seed: Number(f.get("seed")),
    duration: Number(f.get("duration")),
    sample_rate: Number(f.get("sample_rate")),
  };
}

function setup(canvas) {
  const dpr = window.devicePixelRatio || 1;
  canvas.width = canvas.clientWidth * dpr;
  canvas.height = canvas.clientHeight * dpr;
  const ctx = canvas.getContext("2d");
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  ctx.clearRect(0, 0, canvas.clientWidth, canvas.clientHeight);
  return { ctx, w: canvas.clientWidth, h: canvas.clientHeight };
}

// series: [{x, y, color}], all sharing one set of axes
function plot(canvas, series, { ymin, ymax, xlabel = "s" } = {}) {
  const { ctx, w, h } = setup(canvas);
  const pad = 36;
  const xs = series.flatMap((s) => [s.x[0], s.x[s.x.length - 1]]);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  if (ymin === undefined) ymin = Math.min(...series.map((s) => Math.min(...s.y)));
  if (ymax === undefined) ymax = Math.max(...series.map((s) => Math.max(...s.y)));
  if (ymax === ymin) ymax = ymin + 1;
  const px = (x) => pad + ((x - x0) / (x1 - x0 || 1)) * (w - pad - 8);
  const py = (y) => h - pad + 8 - ((Math.min(Math.max(y, ymin), ymax) - ymin) / (ymax - ymin)) * (h - pad);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.beginPath();
  ctx.moveTo(pad, 4);
  ctx.lineTo(pad, h - pad + 8);
  ctx.lineTo(w - 4, h - pad + 8);
  ctx.stroke();
  ctx.fillText(ymax.toPrecision(3), 2, 12);
  ctx.fillText(ymin.toPrecision(3), 2, h - pad + 8);
  ctx.fillText(`${x1.toPrecision(3)} ${xlabel}`, w - 70, h - 8);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1;
    ctx.beginPath();
    s.y.forEach((y, i) => (i ? ctx.lineTo(px(s.x[i]), py(y)) : ctx.moveTo(px(s.x[i]), py(y))));
    ctx.stroke();
  }
}

function fmt(v, unit = " s") {
  return v === null || v === undefined ? "n/a" : v.toFixed(3) + unit;
}

function guarded(fn) {
  return () => {
    $("status").textContent = "";
    try {
      fn();
    } catch (e) {
      $("status").textContent = String(e);
    }
  };
}

function render() {
  const p = params();
  const r = JSON.parse(compareRooms(JSON.stringify(p)));
  lastResponse = r;
  const t = r.sdn.samples.map((_, n) => n / r.sample_rate);
  const peak = Math.max(...r.ism.samples.map(Math.abs), ...r.sdn.samples.map(Math.abs));
  plot($("rir"), [
    { x: t, y: Array.from(r.ism.samples), color: "#d2691e" },
    { x: t, y: Array.from(r.sdn.samples), color: "#1f5fbf" },
  ], { ymin: -peak, ymax: peak });
  plot($("edc"), [
    { x: r.ism.edc.t, y: r.ism.edc.y, color: "#d2691e" },
    { x: r.sdn.edc.t, y: r.sdn.edc.y, color: "#1f5fbf" },
  ], { ymin: -80, ymax: 0 });
  $("stats").innerHTML =
    `<span class="sdn">network T60 ${fmt(r.sdn.t60)}</span>` +
    `<span class="ism">image sources T60 ${fmt(r.ism.t60)}</span>` +
    `<span>Sabine ${fmt(r.sabine)}</span><span>Eyring ${fmt(r.eyring)}</span>`;
  $("play").disabled = false;
}

function play() {
  if (!lastResponse) return;
  const ac = new AudioContext();
  const s = lastResponse.sdn.samples;
  const peak = Math.max(...s.map(Math.abs)) || 1;
  const buf = ac.createBuffer(1, s.length, lastResponse.sample_rate);
  buf.getChannelData(0).set(s.map((x) => (0.8 * x) / peak));
  const src = ac.createBufferSource();
  src.buffer = buf;
  src.connect(ac.destination);
  src.start();
}

function ned() {
  const p = params();
  const kinds = ["isotropic", "householder", "orthogonal", "permutation"];
  const r = JSON.parse(echoDensity(JSON.stringify(p), kinds.join(",")));
  const series = [{ x: r.ism.t, y: r.ism.y, color: "#d2691e" }];
  r.curves.forEach((c, i) => series.push({ x: c.t, y: c.y, color: COLORS[i] }));
  plot($("nedplot"), series, { ymin: 0, ymax: 1.2 });
  $("nedlegend").innerHTML =
    `<span class="ism">image sources</span> ` +
    r.kinds.map((k, i) => `<span style="color:${COLORS[i]}">${k}</span>`).join(" ");
}

function matrix() {
  const p = params();
  const m = JSON.parse(scatteringMatrix(p.matrix, 5, BigInt(p.seed)));
  const { ctx, w, h } = setup($("matplot"));
  const n = m.size;
  const cell = Math.min((w / 2 - 20) / n, (h - 20) / n);
  m.entries.forEach((v, idx) => {
    const r = Math.floor(idx / n), c = idx % n;
    const a = Math.min(Math.abs(v), 1);
    ctx.fillStyle = v >= 0 ? `rgba(31,95,191,${a})` : `rgba(178,34,34,${a})`;
    ctx.fillRect(10 + c * cell, 10 + r * cell, cell - 1, cell - 1);
  });
  // unit circle with eigenvalues
  const cx = w * 0.75, cy = h / 2, rad = Math.min(w / 4, h / 2) - 12;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.arc(cx, cy, rad, 0, 2 * Math.PI);
  ctx.moveTo(cx - rad - 6, cy);
  ctx.lineTo(cx + rad + 6, cy);
  ctx.moveTo(cx, cy - rad - 6);
  ctx.lineTo(cx, cy + rad + 6);
  ctx.stroke();
  ctx.fillStyle = "#b22222";
  for (const [re, im] of m.eigenvalues) {
    ctx.beginPath();
    ctx.arc(cx + re * rad, cy - im * rad, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  $("matinfo").textContent =
    `${m.kind}, lossless: ${m.lossless ? "yes" : "no"}, weights [${m.weights.map((x) => x.toFixed(3)).join(", ")}]`;
}

await init();
$("render").addEventListener("click", guarded(render));
$("play").addEventListener("click", guarded(play));
$("ned").addEventListener("click", guarded(ned));
$("matrix").addEventListener("click", guarded(matrix));
guarded(render)();
