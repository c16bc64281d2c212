// Built with: wasm-bindgen --target web --out-dir www/pkg <fts_web.wasm>
import init, { fit_csv, model_curves, mc_histogram } from "./pkg/fts_web.js";

// synthetic Peru-like rates
const SAMPLE = `date,value
1969,0.0
1970,0.20369239851720256
1971,0.21772177331074838
1972,0.23358064155450053
1973,0.2516346411871544
1974,0.2723512259563583
1975,0.2963371206724148
1976,0.3243933911893029
1977,0.3575984973796744
1978,0.3974372325696196
1979,0.4460076948061489
1980,0.5063666671858815
1981,0.5831329416064621
1982,0.6836004645673963
1983,0.819933437281871
1984,1.0138685850507962
1985,1.3079133834608037
1986,1.7960390301525568
1987,2.7260768296520146
1988,4.9596609248379915
1989,13.436830944034435
1990,126.34984859703579`;

const $ = (id) => document.getElementById(id);

function axes(ctx, w, h, xs, ys) {
  const pad = 40;
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (x) => pad + (w - 2 * pad) * (x - x0) / ((x1 - x0) || 1);
  const sy = (y) => h - pad - (h - 2 * pad) * (y - y0) / ((y1 - y0) || 1);
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText(x0.toPrecision(6), pad, h - pad + 14);
  ctx.fillText(x1.toPrecision(6), w - pad - 50, h - pad + 14);
  ctx.fillText(y1.toPrecision(4), 2, pad + 4);
  ctx.fillText(y0.toPrecision(4), 2, h - pad);
  return [sx, sy];
}

function line(ctx, pts, sx, sy, color) {
  ctx.strokeStyle = color;
  ctx.beginPath();
  pts.forEach(([x, y], k) => (k ? ctx.lineTo(sx(x), sy(y)) : ctx.moveTo(sx(x), sy(y))));
  ctx.stroke();
}

function fail(el, e) {
  el.className = "err";
  el.textContent = String(e);
}

function doFit() {
  const out = $("fit-out");
  try {
    const r = JSON.parse(fit_csv($("csv").value, $("kind").value, $("percent").checked, $("model").value));
    out.className = "";
    const p = r.params;
    out.textContent = Object.entries(p).map(([k, v]) => `${k} = ${typeof v === "number" ? v.toPrecision(6) : v}`).join("\n")
      + `\nchi = ${r.chi.toExponential(3)}  converged = ${r.converged}  (time in ${r.time_unit}s)`;
    const c = $("fit-plot"), ctx = c.getContext("2d");
    const all = r.data.concat(r.curve);
    const [sx, sy] = axes(ctx, c.width, c.height, all.map((p) => p[0]), all.map((p) => p[1]));
    line(ctx, r.curve, sx, sy, "#c33");
    ctx.fillStyle = "#235";
    r.data.forEach(([x, y]) => ctx.fillRect(sx(x) - 2, sy(y) - 2, 4, 4));
  } catch (e) {
    fail(out, e);
  }
}

function doCurve() {
  const out = $("curve-out");
  try {
    const v = (id) => parseFloat($(id).value);
    const r = JSON.parse(model_curves(v("tc"), v("alpha"), v("c0"), v("p0"), v("t0"), v("dt"), 400));
    const q = $("quantity").value;
    out.className = "";
    out.textContent = `gamma = ${r.gamma.toFixed(4)}`;
    const pts = r.t.map((t, k) => [t, r[q][k]]).filter(([, y]) => isFinite(y));
    const c = $("curve-plot"), ctx = c.getContext("2d");
    const [sx, sy] = axes(ctx, c.width, c.height, pts.map((p) => p[0]), pts.map((p) => p[1]));
    line(ctx, pts, sx, sy, "#236");
  } catch (e) {
    fail(out, e);
  }
}

function doMc() {
  const out = $("mc-out");
  out.className = "";
  out.textContent = "running...";
  setTimeout(() => {
    try {
      const r = JSON.parse(mc_histogram($("csv").value, $("kind").value, $("percent").checked,
        parseFloat($("di").value), parseInt($("m").value), BigInt($("seed").value), parseInt($("bins").value)));
      out.textContent = `t_c = ${r.tc_calendar}, mean ${r.tc_mean.toPrecision(7)} ± ${r.tc_std.toPrecision(3)}`
        + `, skewness ${r.skewness.toFixed(2)}, accepted ${r.accepted}, non-converged ${r.non_converged}`;
      const c = $("mc-plot"), ctx = c.getContext("2d");
      const n = r.counts.length, w = (r.hi - r.lo) / n;
      const [sx, sy] = axes(ctx, c.width, c.height, [r.lo, r.hi], [0, Math.max(...r.counts)]);
      ctx.fillStyle = "#6a8";
      r.counts.forEach((k, i) => {
        const x = sx(r.lo + i * w);
        ctx.fillRect(x, sy(k), sx(r.lo + (i + 1) * w) - x - 1, sy(0) - sy(k));
      });
    } catch (e) {
      fail(out, e);
    }
  }, 10);
}

await init();
$("csv").value = SAMPLE;
$("fit").onclick = doFit;
$("mc").onclick = doMc;
for (const id of ["tc", "alpha", "c0", "p0", "t0", "dt", "quantity"]) $(id).oninput = doCurve;
doFit();
doCurve();
