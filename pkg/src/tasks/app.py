from celery import Celery

from src.config import settings


app = Celery(
    "src.tasks.app",
    broker=settings.celery_broker_url,
    backend=settings.celery_backend_url,
)

app.autodiscover_tasks([
    "src.tasks.analysis_worker",
])


app.conf.update(
    task_serializer="json",
    result_serializer="json",
    accept_content=["json"],
    task_always_eager=settings.celery_always_eager,
    task_eager_propagates=True,
    task_routes={
        # Очередь анализа контрактов
        "src.tasks.analysis_worker.analyze_contract": {"queue": "analysis_queue"},
        # Очередь сверки с оракулом
        "src.tasks.analysis_worker.check_contract_theorems": {"queue": "oracle_queue"},
    },
)
