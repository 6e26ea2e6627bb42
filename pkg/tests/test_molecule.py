import pytest

from pendular.molecule import BENZONITRILE, MoleculeSpec, get_molecule, molecule_from_file


def test_benzonitrile_preset():
    m = get_molecule("benzonitrile")
    assert m is BENZONITRILE
    assert (m.B_x, m.B_y, m.B_z) == (1214.0, 1547.0, 5655.0)
    assert m.mu == 4.515
    assert (m.alpha_xx, m.alpha_yy, m.alpha_zz) == (7.49, 13.01, 18.64)
    assert m.alpha_zx == pytest.approx(11.15)
    assert m.alpha_yx == pytest.approx(5.52)


def test_constant_ordering_enforced():
    with pytest.raises(ValueError):
        MoleculeSpec("bad", 1547.0, 1214.0, 5655.0, 1.0, 1.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        MoleculeSpec("bad", -1.0, 2.0, 3.0, 1.0, 1.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        MoleculeSpec("bad", 1.0, 2.0, 3.0, -0.1, 1.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        MoleculeSpec("bad", 1.0, 2.0, 3.0, 1.0, 0.0, 2.0, 3.0)


def test_molecule_file_roundtrip(tmp_path):
    path = tmp_path / "mol.txt"
    path.write_text(
        "# test molecule\n"
        "name = benzonitrile-file\n"
        "B_x_MHz = 1214\n"
        "B_y_MHz = 1547\n"
        "B_z_MHz = 5655\n"
        "mu_D = 4.515\n"
        "alpha_xx_A3 = 7.49\n"
        "alpha_yy_A3 = 13.01\n"
        "alpha_zz_A3 = 18.64\n"
    )
    m = molecule_from_file(path)
    assert m.name == "benzonitrile-file"
    assert m.B_z == 5655.0
    assert m.alpha_yy == 13.01


def test_molecule_file_errors(tmp_path):
    path = tmp_path / "mol.txt"
    path.write_text("name = x\nB_x_MHz = 1\n")
    with pytest.raises(ValueError, match="missing keys"):
        molecule_from_file(path)
    path.write_text("nonsense_key = 3\n")
    with pytest.raises(ValueError, match="unknown key"):
        molecule_from_file(path)
    path.write_text("name = x\nname = y\n")
    with pytest.raises(ValueError, match="duplicate"):
        molecule_from_file(path)


def test_unknown_preset():
    with pytest.raises(ValueError, match="unknown molecule preset"):
        get_molecule("water")
