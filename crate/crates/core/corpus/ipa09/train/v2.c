int main() {
    int total, hours, minutes, seconds;
    scanf("%d", &total);
    hours = 0;
    while (total >= 3600) {
        total = total - 3600;
        hours++;
    }
    minutes = 0;
    while (total >= 60) {
        total = total - 60;
        minutes++;
    }
    seconds = total;
    printf("%02d:%02d:%02d\n", hours, minutes, seconds);
    return 0;
}
