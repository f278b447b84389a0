import numpy as np
import pytest

from softlabel.core import HardDataset, InvalidDistributionError, SoftDataset
from softlabel.io import ParseError, SchemaError, load_dataset, save_dataset


def write(path, text):
    path.write_text(text)
    return path


def test_hard_file(tmp_path):
    d = load_dataset(write(tmp_path / "h.csv", "f_0,f_1,label\n1,2,0\n3,4,1\n"))
    assert isinstance(d, HardDataset) and d.features.shape == (2, 2) and d.labels.tolist() == [0, 1]


def test_soft_file(tmp_path):
    d = load_dataset(write(tmp_path / "s.csv", "f_0,p_0,p_1\n1,0.25,0.75\n2,1,0\n"))
    assert isinstance(d, SoftDataset) and d.class_count == 2


def test_bad_files(tmp_path):
    with pytest.raises(InvalidDistributionError):
        load_dataset(write(tmp_path / "a.csv", "f_0,p_0,p_1\n1,0.5,0.3\n"))
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path / "b.csv", "f_0,label,p_0,p_1\n1,0,1,0\n"))
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path / "c.csv", "x,label\n1,0\n"))
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path / "d.csv", "f_0,p_0,p_2\n1,1,0\n"))
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path / "e.csv", "f_0,label\n1,-1\n"))
    with pytest.raises(ParseError):
        load_dataset(write(tmp_path / "f.csv", "f_0,label\n1\n"))
    with pytest.raises(ParseError):
        load_dataset(write(tmp_path / "g.csv", "f_0,label\nabc,1\n"))
    with pytest.raises(ParseError):
        load_dataset(write(tmp_path / "h.csv", ""))


def test_round_trip_is_exact(tmp_path, soft_data):
    save_dataset(soft_data, tmp_path / "s.csv")
    back = load_dataset(tmp_path / "s.csv")
    assert np.array_equal(back.features, soft_data.features)
    assert np.allclose(back.labels, soft_data.labels, atol=1e-15, rtol=0)
    save_dataset(back, tmp_path / "t.csv")
    assert (tmp_path / "s.csv").read_bytes() == (tmp_path / "t.csv").read_bytes()
    h = HardDataset(soft_data.features, soft_data.labels.argmax(axis=1))
    save_dataset(h, tmp_path / "h.csv")
    assert np.array_equal(load_dataset(tmp_path / "h.csv").labels, h.labels)
