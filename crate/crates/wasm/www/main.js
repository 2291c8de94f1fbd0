import init, { render_scene, certify, figure } from "./pkg/ucv_wasm.js";

const $ = (id) => document.getElementById(id);

$("scene").value = JSON.stringify({
  norm: { kind: "lp", p: 3 },
  world: { kind: "box", min: [-10, -10], max: [10, 10] },
  sites: [
    { kind: "point", at: [-5, 4] },
    { kind: "point", at: [3, 6] },
    { kind: "segment", a: [-4, -5], b: [1, -3] },
    { kind: "disc", center: [5, -4], radius: 1.5 },
  ],
}, null, 2);

// Runs `f` and shows either its result or its error in `target`.
function show(target, f, asSvg) {
  try {
    const out = f();
    target.classList.remove("error");
    if (asSvg) target.innerHTML = out; else target.textContent = out;
  } catch (e) {
    target.classList.add("error");
    target.textContent = String(e.message ?? e);
  }
}

function drawScene() {
  show($("scene-plot"), () => render_scene($("scene").value, Number($("directions").value)), true);
}

function drawFigure() {
  const beta = Number($("beta").value);
  $("beta-value").textContent = beta.toFixed(2);
  show($("figure-plot"), () => figure(beta, $("variant").value), true);
}

await init();
$("draw").onclick = drawScene;
$("certify").onclick = () =>
  show($("certificate"), () => certify($("scene").value, Number($("epsilon").value), $("interior").checked), false);
$("beta").oninput = drawFigure;
$("variant").onchange = drawFigure;
drawScene();
drawFigure();
