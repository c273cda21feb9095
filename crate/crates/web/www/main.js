import init, { psi_profiles, resonance_curve, resonances, kernel_slice, limit_label } from "./pkg/deltalimit_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function columns(flat, width) {
  const cols = Array.from({ length: width }, () => []);
  for (let i = 0; i < flat.length; i += width) {
    for (let j = 0; j < width; j++) cols[j].push(flat[i + j]);
  }
  return cols;
}

function plot(canvas, xs, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 40;
  ctx.clearRect(0, 0, w, h);
  let lo = Infinity, hi = -Infinity;
  for (const s of series) for (const v of s.ys) if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  if (opts.clip) { lo = Math.max(lo, -opts.clip); hi = Math.min(hi, opts.clip); }
  if (!(hi > lo)) { hi = lo + 1; }
  const x0 = xs[0], x1 = xs[xs.length - 1];
  const px = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (y) => h - pad - ((Math.min(Math.max(y, lo), hi) - lo) / (hi - lo)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  if (lo < 0 && hi > 0) {
    ctx.beginPath(); ctx.moveTo(pad, py(0)); ctx.lineTo(w - pad, py(0)); ctx.stroke();
  }
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(hi.toPrecision(4), 2, pad + 4);
  ctx.fillText(lo.toPrecision(4), 2, h - pad);
  ctx.fillText(x0.toPrecision(4), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(4), w - pad - 30, h - pad + 14);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    s.ys.forEach((y, i) => (i ? ctx.lineTo(px(xs[i]), py(y)) : ctx.moveTo(px(xs[i]), py(y))));
    ctx.stroke();
  }
  for (const m of opts.marks || []) {
    ctx.fillStyle = "#000";
    ctx.beginPath(); ctx.arc(px(m), py(0), 3, 0, 2 * Math.PI); ctx.fill();
  }
}

function guarded(outId, fn) {
  try { fn(); } catch (e) { if (outId) $(outId).textContent = String(e); else console.error(e); }
}

function drawProfiles() {
  guarded(null, () => {
    const [x, p, p0] = columns(psi_profiles(num("p-xi"), num("p-theta"), 301), 3);
    plot($("p-canvas"), x, [{ ys: p, color: "#1f77b4" }, { ys: p0, color: "#d62728" }]);
  });
}

function drawResonances() {
  guarded("r-out", () => {
    const xi = num("r-xi"), lo = num("r-lo"), hi = num("r-hi");
    const [t, r] = columns(resonance_curve(xi, lo, hi, 800), 2);
    const found = columns(resonances(xi, lo, Math.min(hi, -1e-3), 8), 2);
    plot($("r-canvas"), t, [{ ys: r, color: "#1f77b4" }], { clip: 5, marks: found[0] });
    $("r-out").textContent = found[0].length
      ? found[0].map((th, i) => `theta = ${th.toPrecision(12)}   alpha/omega = ${found[1][i].toPrecision(12)}`).join("\n")
      : "no resonances in range";
  });
}

function drawKernel() {
  guarded("k-out", () => {
    const th = num("k-theta"), om = num("k-omega");
    const [x, gr, gi, rr, ri] = columns(
      kernel_slice(th, om, num("k-eps"), num("k-y"), num("k-zr"), num("k-zi"), 5, 400), 5);
    plot($("k-canvas"), x, [
      { ys: gr, color: "#1f77b4" }, { ys: rr, color: "#d62728" },
      { ys: gi, color: "#2ca02c" }, { ys: ri, color: "#9467bd" },
    ]);
    const gap = Math.max(...gr.map((v, i) => Math.hypot(v - rr[i], gi[i] - ri[i])));
    $("k-out").textContent = `limit: ${limit_label(th, om)}   max |G - G_limit| on the slice: ${gap.toExponential(3)}`;
  });
}

await init();
for (const id of ["p-xi", "p-theta"]) $(id).addEventListener("input", drawProfiles);
for (const id of ["r-xi", "r-lo", "r-hi"]) $(id).addEventListener("change", drawResonances);
for (const id of ["k-theta", "k-omega", "k-eps", "k-y", "k-zr", "k-zi"]) $(id).addEventListener("change", drawKernel);
drawProfiles();
drawResonances();
drawKernel();
