"""Smoke test for the pyvarmap extension.

Build it first with `cargo build --release -p pyvarmap`, then run
`python3 python/smoke_test.py [path/to/libpyvarmap.so]`.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "crates" / "core" / "corpus"

CORRECT = """int main() {
    int n, i;
    scanf("%d", &n);
    for (i = 1; i <= n; i++) {
        printf("%d\\n", i);
    }
    return 0;
}
"""


def load(lib):
    tmp = pathlib.Path(tempfile.mkdtemp())
    target = tmp / "pyvarmap.so"
    shutil.copy(lib, target)
    module_spec = importlib.util.spec_from_file_location("pyvarmap", target)
    module = importlib.util.module_from_spec(module_spec)
    module_spec.loader.exec_module(module)
    return module, tmp


def main():
    lib = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "target" / "release" / "libpyvarmap.so"
    vm, tmp = load(lib)

    correct = vm.Program(CORRECT)
    assert correct.variables() == ["n", "i"]
    out, status, uninit = correct.run("3\n")
    assert (out, status, uninit) == ("1\n2\n3\n", "ok", False)
    suite = str(CORPUS / "ipa05" / "suite")
    passed, total = correct.test(suite)
    assert passed == total > 0

    buggy = vm.Program(CORRECT.replace("i <= n", "i < n"))
    assert buggy.test(suite)[0] < total
    fixed = vm.repair(buggy, correct, suite, budget=30.0)
    assert fixed["status"] == "fixed", fixed
    assert "i <= n" in fixed["fixed_source"]

    assert vm.overlap_coefficient({"n": "l", "i": "j"}, {"n": "l", "i": "k"}) == 0.5

    try:
        vm.Program("int main( {")
    except ValueError:
        pass
    else:
        raise AssertionError("parse error not raised")

    data = tmp / "pairs.jsonl"
    records = vm.generate_dataset(str(data), seed=0)
    assert records > 0 and data.exists()
    model, losses = vm.train(str(data), epochs=1, hidden=8, max_pairs=40)
    assert len(losses) == 1 and model.hidden == 8
    mapping, probs = model.predict(buggy, correct)
    assert set(mapping) == {"n", "i"}
    assert all(abs(sum(row.values()) - 1.0) < 1e-9 for row in probs.values())
    ckpt = tmp / "model.ckpt"
    model.save(str(ckpt))
    assert vm.Model.load(str(ckpt)).predict(buggy, correct)[0] == mapping

    print("pyvarmap smoke test passed")


if __name__ == "__main__":
    main()
