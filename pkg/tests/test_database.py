from src.database.models import Database


def test_save_and_list_runs(database_url):
    db = Database(database_url)
    first = db.save_run('verify-all', 13, 3.0, True, {'n': 13, 'checks': []})
    second = db.save_run('verify-all', 13, 30.0, False, {'n': 13, 'p': 30.0})
    runs = db.list_runs()
    assert [run.id for run in runs] == [second, first]
    assert runs[0].passed is False
    assert runs[0].report == {'n': 13, 'p': 30.0}
    assert len(db.list_runs(limit=1)) == 1


def test_empty_report_is_stored_as_null(database_url):
    db = Database(database_url)
    db.save_run('verify-all', 16, 3.0, True, {})
    run = db.list_runs()[0]
    assert run.report_json is None
    assert run.report == {}


def test_save_and_get_branch(database_url):
    db = Database(database_url)
    points = [[0.0, 0.0, 0.0, 695.6], [0.05, 12.5, 0.02, 650.1]]
    branch_id = db.save_branch(6, 3.0, 200, 371.25, 1, False, points)
    record = db.get_branch(branch_id)
    assert record.grid == 200
    assert record.lambda_star == 371.25
    assert record.points == points
    assert db.get_branch(branch_id + 1) is None


def test_clear_all(database_url):
    db = Database(database_url)
    db.save_run('verify-all', 13, 3.0, True, {'n': 13})
    db.save_branch(6, 3.0, 100, 1.0, 1, True, [])
    assert db.clear_all() == 2
    assert db.list_runs() == []
