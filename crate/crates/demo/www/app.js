// Static page logic: calls the wasm JSON functions and draws the curves.
// Build the module first (see ../README.md), which places
// macroreal_demo.js and the .wasm binary in pkg/.
import init, { figure_scan, construction_sweep, construction_point } from "./pkg/macroreal_demo.js";

const COLORS = ["#58a6ff", "#d29922", "#f85149", "#3fb950", "#bc8cff"];

function plot(canvas, xs, series, windowIdx) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height;
  ctx.clearRect(0, 0, W, H);
  const pad = { l: 52, r: 12, t: 10, b: 26 };
  const xmin = xs[0], xmax = xs[xs.length - 1];
  let ymin = 0, ymax = 0;
  for (const s of series) for (const v of s.values) { ymin = Math.min(ymin, v); ymax = Math.max(ymax, v); }
  const span = (ymax - ymin) || 1; ymin -= 0.08 * span; ymax += 0.08 * span;
  const X = x => pad.l + (x - xmin) / (xmax - xmin) * (W - pad.l - pad.r);
  const Y = y => pad.t + (ymax - y) / (ymax - ymin) * (H - pad.t - pad.b);

  // violation windows
  if (windowIdx && windowIdx.length) {
    ctx.fillStyle = "rgba(63,185,80,0.12)";
    const step = xs.length > 1 ? xs[1] - xs[0] : 0;
    for (const k of windowIdx) {
      ctx.fillRect(X(xs[k] - step / 2), pad.t, X(xs[k] + step / 2) - X(xs[k] - step / 2), H - pad.t - pad.b);
    }
  }
  // axes
  ctx.strokeStyle = "#30363d"; ctx.fillStyle = "#8b99a6"; ctx.font = "11px ui-monospace, monospace";
  ctx.beginPath(); ctx.moveTo(pad.l, Y(0)); ctx.lineTo(W - pad.r, Y(0)); ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const y = ymin + (ymax - ymin) * i / 4;
    ctx.fillText(y.toFixed(2), 6, Y(y) + 4);
    const x = xmin + (xmax - xmin) * i / 4;
    ctx.fillText(x.toFixed(2), X(x) - 10, H - 8);
  }
  // curves
  series.forEach((s, si) => {
    ctx.strokeStyle = COLORS[si % COLORS.length];
    ctx.lineWidth = 1.6;
    ctx.beginPath();
    s.values.forEach((v, k) => { const px = X(xs[k]), py = Y(v); k ? ctx.lineTo(px, py) : ctx.moveTo(px, py); });
    ctx.stroke();
  });
}

function legend(el, names) {
  el.innerHTML = names.map((n, i) => `<span style="color:${COLORS[i % COLORS.length]}">${n}</span>`).join("");
}

function drawFigure() {
  const fig = document.getElementById("figure").value;
  const grid = parseInt(document.getElementById("grid").value, 10);
  const data = JSON.parse(figure_scan(fig, grid));
  if (data.error) { document.getElementById("figreadout").textContent = data.error; return; }
  plot(document.getElementById("figcanvas"), data.params, data.series, data.window);
  legend(document.getElementById("figlegend"), data.series.map(s => s.family + " min"));
  const n = data.window.length;
  const msg = n
    ? `regime window: ${n} grid points where {${data.satisfied.join(", ")}} hold and {${data.violated.join(", ")}} fail\n` +
      `e.g. ${data.param_name} = ${data.params[data.window[0]].toFixed(4)}`
    : "no regime window on this grid";
  const el = document.getElementById("figreadout");
  el.textContent = msg;
  el.className = "readout " + (n ? "win" : "bad");
}

let sweepCache = null;
function drawConstructionSweep() {
  const n = parseInt(document.getElementById("cn").value, 10);
  sweepCache = JSON.parse(construction_sweep(n, 241));
  const { alphas, lg2_min, lg3_min, pentagon_min } = sweepCache;
  const series = [
    { family: "LG2", values: lg2_min },
    { family: "LG3", values: lg3_min },
    { family: "PI", values: pentagon_min },
  ];
  const windowIdx = alphas.map((_, k) => k)
    .filter(k => lg2_min[k] >= -1e-9 && lg3_min[k] >= -1e-9 && pentagon_min[k] < -1e-9);
  plot(document.getElementById("concanvas"), alphas, series, windowIdx);
  legend(document.getElementById("conlegend"), ["LG2 min", "LG3 min", "pentagon min"]);
  drawConstructionPoint();
}

function drawConstructionPoint() {
  if (!sweepCache) return;
  const n = parseInt(document.getElementById("cn").value, 10);
  const t = parseInt(document.getElementById("alpha").value, 10) / 1000;
  const { alphas } = sweepCache;
  const a = alphas[0] + (alphas[alphas.length - 1] - alphas[0]) * t;
  const p = JSON.parse(construction_point(n, a));
  if (p.error) { document.getElementById("conreadout").textContent = p.error; return; }
  const lines = [`n = ${n}   α = ${a.toFixed(4)}   θ = ${p.theta.toFixed(4)}`];
  for (const r of p.reports) {
    lines.push(`${r.family.padEnd(6)} min = ${r.min.toFixed(6)}  ${r.satisfied ? "satisfied" : "VIOLATED"}`);
  }
  document.getElementById("conreadout").textContent = lines.join("\n");
}

async function main() {
  await init();
  document.getElementById("status").hidden = true;
  document.querySelector("main").hidden = false;
  document.getElementById("figure").addEventListener("change", drawFigure);
  document.getElementById("grid").addEventListener("change", drawFigure);
  document.getElementById("cn").addEventListener("change", drawConstructionSweep);
  document.getElementById("alpha").addEventListener("input", drawConstructionPoint);
  drawFigure();
  drawConstructionSweep();
}

main().catch(e => { document.getElementById("status").textContent = "failed to load: " + e; });
