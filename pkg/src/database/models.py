"""
Модели базы данных: архив прогонов проверки и ветвей задачи Навье
"""
import logging
import json
from datetime import datetime
from typing import List, Optional

from sqlalchemy import create_engine, Column, String, Integer, DateTime, Float, Boolean, Text
from sqlalchemy.orm import declarative_base, sessionmaker

Base = declarative_base()
logger = logging.getLogger(__name__)


class VerificationRun(Base):
    """Модель прогона проверки"""
    __tablename__ = 'verification_runs'

    id = Column(Integer, primary_key=True, autoincrement=True)
    command = Column(String, nullable=False)
    n = Column(Integer, nullable=False)
    p = Column(Float, nullable=False)
    passed = Column(Boolean, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)
    report_json = Column(Text)  # JSON-отчет целиком

    def __repr__(self):
        return f"<VerificationRun(command={self.command}, n={self.n}, p={self.p}, passed={self.passed})>"

    @property
    def report(self) -> dict:
        """Получить отчет из JSON"""
        if self.report_json:
            try:
                return json.loads(self.report_json)
            except ValueError:
                return {}
        return {}

    @report.setter
    def report(self, value: dict):
        self.report_json = json.dumps(value, ensure_ascii=False) if value else None


class BranchRecord(Base):
    """Модель сохраненной ветви (λ, sup u, eigMin)"""
    __tablename__ = 'branches'

    id = Column(Integer, primary_key=True, autoincrement=True)
    n = Column(Integer, nullable=False)
    p = Column(Float, nullable=False)
    grid = Column(Integer, nullable=False)
    lambda_star = Column(Float, nullable=False)
    fold_index = Column(Integer, nullable=False)
    fold_detected = Column(Boolean, default=False)
    created_at = Column(DateTime, default=datetime.utcnow)
    points_json = Column(Text)  # [[s, λ, sup u, eigMin], ...]

    def __repr__(self):
        return f"<BranchRecord(n={self.n}, p={self.p}, grid={self.grid}, lambda_star={self.lambda_star})>"

    @property
    def points(self) -> list:
        if self.points_json:
            try:
                return json.loads(self.points_json)
            except ValueError:
                return []
        return []

    @points.setter
    def points(self, value: list):
        self.points_json = json.dumps(value) if value else None


class Database:
    """Класс для работы с базой данных"""

    def __init__(self, database_url: str):
        self.engine = create_engine(database_url)
        Base.metadata.create_all(self.engine)
        self.Session = sessionmaker(bind=self.engine)

    def get_session(self):
        """Получить сессию БД"""
        return self.Session()

    def save_run(self, command: str, n: int, p: float, passed: bool, report: dict) -> int:
        """Сохранить прогон проверки, вернуть его id"""
        session = self.get_session()
        try:
            run = VerificationRun(command=command, n=n, p=p, passed=passed)
            run.report = report
            session.add(run)
            session.commit()
            logger.info(f"Прогон {command} (n={n}, p={p}) сохранен под id={run.id}")
            return run.id
        except Exception as e:
            session.rollback()
            logger.error(f"Ошибка при сохранении прогона {command}: {e}")
            raise e
        finally:
            session.close()

    def save_branch(self, n: int, p: float, grid: int, lambda_star: float, fold_index: int,
                    fold_detected: bool, points: list) -> int:
        """Сохранить ветвь, вернуть ее id"""
        session = self.get_session()
        try:
            record = BranchRecord(
                n=n,
                p=p,
                grid=grid,
                lambda_star=lambda_star,
                fold_index=fold_index,
                fold_detected=fold_detected,
            )
            record.points = points
            session.add(record)
            session.commit()
            logger.info(f"Ветвь n={n}, p={p}, N={grid} сохранена под id={record.id}")
            return record.id
        except Exception as e:
            session.rollback()
            logger.error(f"Ошибка при сохранении ветви n={n}, p={p}: {e}")
            raise e
        finally:
            session.close()

    def list_runs(self, limit: Optional[int] = None) -> List[VerificationRun]:
        """Последние прогоны, новые первыми"""
        session = self.get_session()
        try:
            query = session.query(VerificationRun).order_by(VerificationRun.id.desc())
            if limit is not None:
                query = query.limit(limit)
            return query.all()
        finally:
            session.close()

    def get_branch(self, branch_id: int) -> Optional[BranchRecord]:
        """Получить ветвь по id"""
        session = self.get_session()
        try:
            return session.query(BranchRecord).filter_by(id=branch_id).first()
        finally:
            session.close()

    def clear_all(self) -> int:
        """Удалить все прогоны и ветви, вернуть число удаленных записей"""
        session = self.get_session()
        try:
            count = session.query(VerificationRun).count() + session.query(BranchRecord).count()
            session.query(VerificationRun).delete()
            session.query(BranchRecord).delete()
            session.commit()
            return count
        except Exception as e:
            session.rollback()
            logger.error(f"Ошибка при очистке БД: {e}")
            raise e
        finally:
            session.close()
